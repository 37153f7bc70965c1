# coding=utf8

# Copyright 2026 the quadwind Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Quadcopter physics: rigid body, motors, rotor aerodynamics and drag.

This module holds the pieces the `Simulator` (see `engine.py`) wires together
at every time step:

* the rigid-body equations of motion with a nonlinear drag term, in the
  north-east-down (NED) inertial frame, with Euler angles `(phi, theta, psi)`
  and their rates as the rotational state;
* a third-order motor model driven by a PID rate controller through a
  saturated pulse-width-modulation (PWM) command;
* the rotor mixing matrix and its inverse;
* two rotor aerodynamic effects: the air-relative thrust correction (through
  the induced velocity) and blade flapping;
* fixed-step integrators.

Conventions. Vectors are numpy float64 arrays of shape `(3,)` ("Vec3"). The
body frame is x forward, y right, z down; rotor thrust is expressed as a
body-frame vector `(T_x, T_y, T_z)` whose `T_z` component points *up* the
rotor axis, so that the NED force it produces is `R . (T_x, T_y, -T_z)`. With
no blade flapping this is the familiar `-F R e3` thrust term. Airspeed is the
wind minus the ground velocity.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections

import numpy as np
from scipy import optimize
from scipy import signal

import six


# Quadcopter constants for the 3DR Iris+-class airframe we model.
ROTOR_RADIUS = 0.1207        # m
AIR_DENSITY = 1.225          # kg/m^3

# Motor transfer function coefficients [a3, a2, a1, a0, b0].
MOTOR_COEFFICIENTS = (1.0, 189.5, 13412.0, 142834.0, 2057342.0)

# Below this horizontal airspeed (m/s) blade flapping has no direction.
FLAPPING_EPSILON = 1e-9

# Largest thrust gain the air-relative correction may apply. Momentum theory
# stops describing the rotor once v_i + w approaches zero (vortex ring state).
THRUST_CORRECTION_CAP = 2.0


class SimulationError(RuntimeError):
  """A simulated flight could not continue."""


class DivergenceError(SimulationError):
  """The simulated state left the configured numerical bound.

  Attributes:
    time: simulation time (s) at which the bound was exceeded.
  """

  def __init__(self, time, message=None):
    self.time = time
    if message is None:
      message = 'Simulation diverged at t={:.3f} s.'.format(time)
    super(DivergenceError, self).__init__(message)


class InducedVelocityError(ArithmeticError):
  """No induced velocity could be bracketed for the given airspeed."""


### Vectors and frames ###


def vec3(value, name='vector'):
  """Coerce `value` to a finite float64 Vec3.

  Args:
    value: anything `np.asarray` accepts with three elements.
    name: what to call the vector in error messages.

  Returns:
    a new float64 numpy array of shape `(3,)`.

  Raises:
    ValueError: `value` does not have three elements or is not finite.
  """
  array = np.array(value, dtype=np.float64).reshape(-1)
  if array.shape != (3,):
    raise ValueError('{} must have exactly three components; got {}.'.format(
        name, array.shape[0]))
  if not np.all(np.isfinite(array)):
    raise ValueError('{} must be finite; got {}.'.format(name, array))
  return array


def rotation_matrix(attitude):
  """Body-to-NED rotation for Euler angles `(phi, theta, psi)` (ZYX order)."""
  phi, theta, psi = attitude
  cphi, sphi = np.cos(phi), np.sin(phi)
  cth, sth = np.cos(theta), np.sin(theta)
  cpsi, spsi = np.cos(psi), np.sin(psi)
  return np.array([
      [cth * cpsi, sphi * sth * cpsi - cphi * spsi,
       cphi * sth * cpsi + sphi * spsi],
      [cth * spsi, sphi * sth * spsi + cphi * cpsi,
       cphi * sth * spsi - sphi * cpsi],
      [-sth, sphi * cth, cphi * cth]])


### Parameters and state ###


def momentum_hover_induced_velocity(mass, gravity, rotor_radius=ROTOR_RADIUS,
                                    air_density=AIR_DENSITY, rotors=4):
  """Hover induced velocity from actuator-disk momentum theory.

  Each of `rotors` rotors carries an equal share of the weight; the induced
  velocity is then `sqrt(T / (2 rho A))`. With the default airframe this is
  about 5.73 m/s.

  Args:
    mass: vehicle mass (kg).
    gravity: gravitational acceleration (m/s^2).
    rotor_radius: rotor radius (m).
    air_density: air density (kg/m^3).
    rotors: number of rotors sharing the load.

  Returns:
    the hover induced velocity v_h (m/s).

  Raises:
    ValueError: any argument is not strictly positive.
  """
  for name, value in (('mass', mass), ('gravity', gravity),
                      ('rotor_radius', rotor_radius),
                      ('air_density', air_density), ('rotors', rotors)):
    if value <= 0:
      raise ValueError('{} must be positive; got {}.'.format(name, value))
  thrust_per_rotor = mass * gravity / rotors
  disk_area = np.pi * rotor_radius ** 2
  return float(np.sqrt(thrust_per_rotor / (2.0 * air_density * disk_area)))


class QuadParams(collections.namedtuple(
    'QuadParams', ['mass', 'inertia', 'arm_length', 'thrust_coeff',
                   'torque_coeff', 'flapping_coeff', 'gravity',
                   'hover_induced_velocity'])):
  """Physical parameters of the quadcopter.

  Defaults describe the airframe we fly everywhere in this package: m = 1.5 kg,
  J = diag(0.0348, 0.0459, 0.0977) kg m^2, L = 0.235 m, k1 = k2 = 5e-5,
  K_f = 0.003 rad s/m and g = 9.81 m/s^2. When `hover_induced_velocity` is
  None it is computed from momentum theory (see
  `momentum_hover_induced_velocity`).

  Every field must be strictly positive; `inertia` is the diagonal of the
  inertia matrix as a Vec3.
  """
  __slots__ = ()

  def __new__(cls, mass=1.5, inertia=(0.0348, 0.0459, 0.0977),
              arm_length=0.235, thrust_coeff=5e-5, torque_coeff=5e-5,
              flapping_coeff=0.003, gravity=9.81, hover_induced_velocity=None):
    if hover_induced_velocity is None:
      hover_induced_velocity = momentum_hover_induced_velocity(mass, gravity)
    inertia = vec3(inertia, 'inertia')
    if np.any(inertia <= 0):
      raise ValueError('inertia must be strictly positive; got {}.'.format(
          inertia))
    for name, value in (('mass', mass), ('arm_length', arm_length),
                        ('thrust_coeff', thrust_coeff),
                        ('torque_coeff', torque_coeff),
                        ('flapping_coeff', flapping_coeff),
                        ('gravity', gravity),
                        ('hover_induced_velocity', hover_induced_velocity)):
      if not value > 0:
        raise ValueError('QuadParams.{} must be positive; got {}.'.format(
            name, value))
    return super(QuadParams, cls).__new__(
        cls, float(mass), inertia, float(arm_length), float(thrust_coeff),
        float(torque_coeff), float(flapping_coeff), float(gravity),
        float(hover_induced_velocity))

  @property
  def weight(self):
    return self.mass * self.gravity


class QuadState(collections.namedtuple(
    'QuadState', ['position', 'velocity', 'attitude', 'angular_rate'])):
  """Rigid-body state of the quadcopter.

  * `position`: `(p_n, p_e, p_d)` in metres, NED.
  * `velocity`: the time derivative of `position`, m/s.
  * `attitude`: Euler angles `(phi, theta, psi)` in radians.
  * `angular_rate`: Euler angle rates `(phi', theta', psi')` in rad/s.

  The same type carries state derivatives, in which case each field holds the
  derivative of the corresponding state field.
  """
  __slots__ = ()

  @classmethod
  def at_rest(cls, position=(0.0, 0.0, 0.0), yaw=0.0):
    """A motionless, level state at `position` facing `yaw`."""
    return cls(vec3(position, 'position'), np.zeros(3),
               np.array([0.0, 0.0, float(yaw)]), np.zeros(3))

  @classmethod
  def from_vector(cls, vector):
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (12,):
      raise ValueError('A QuadState vector has 12 entries; got shape {}.'.format(
          vector.shape))
    return cls(vector[0:3].copy(), vector[3:6].copy(), vector[6:9].copy(),
               vector[9:12].copy())

  def as_vector(self):
    return np.concatenate([self.position, self.velocity, self.attitude,
                           self.angular_rate]).astype(np.float64)


### Drag and rigid-body dynamics ###


def drag_coefficient(airspeed_magnitude):
  """Fitted drag coefficient (kg/m) at an airspeed magnitude (m/s).

  C_d = min(1.1, 0.2 + 0.9 exp(-0.6 |V_a| - 2)), applied identically on each
  axis. Accepts scalars or arrays.
  """
  speed = np.abs(np.asarray(airspeed_magnitude, dtype=np.float64))
  coefficient = np.minimum(1.1, 0.2 + 0.9 * np.exp(-0.6 * speed - 2.0))
  return float(coefficient) if coefficient.ndim == 0 else coefficient


def drag_force(wind, velocity):
  """Drag force (N) from the air-relative velocity `wind - velocity`."""
  relative = np.asarray(wind, dtype=np.float64) - np.asarray(
      velocity, dtype=np.float64)
  speed = np.sqrt(relative.dot(relative))
  return drag_coefficient(speed) * relative * speed


def body_airspeed(state, wind):
  """Airspeed `(u, v, w)` in the body frame: R^T (V_w - p')."""
  return rotation_matrix(state.attitude).T.dot(
      np.asarray(wind, dtype=np.float64) - state.velocity)


def rigid_body_derivative(state, thrust_vector_body, torques, wind, params):
  """Time derivative of `state` under thrust, torques, gravity and drag.

  Args:
    state: current `QuadState`.
    thrust_vector_body: total rotor thrust `(T_x, T_y, T_z)` in the body frame,
        `T_z` pointing up the rotor axis (see module docstring).
    torques: `(tau_phi, tau_theta, tau_psi)` in N m.
    wind: wind velocity at the vehicle, NED, m/s.
    params: `QuadParams`.

  Returns:
    a `QuadState` whose fields are the derivatives of the state fields.
  """
  t_x, t_y, t_z = thrust_vector_body
  rotation = rotation_matrix(state.attitude)
  force = rotation.dot([t_x, t_y, -t_z]) + drag_force(wind, state.velocity)
  acceleration = force / params.mass + np.array([0.0, 0.0, params.gravity])

  j_x, j_y, j_z = params.inertia
  d_phi, d_theta, d_psi = state.angular_rate
  tau_phi, tau_theta, tau_psi = torques
  angular_acceleration = np.array([
      (j_y - j_z) / j_x * d_theta * d_psi + tau_phi / j_x,
      (j_z - j_x) / j_y * d_phi * d_psi + tau_theta / j_y,
      (j_x - j_y) / j_z * d_phi * d_theta + tau_psi / j_z])

  return QuadState(state.velocity.copy(), acceleration,
                   state.angular_rate.copy(), angular_acceleration)


### Integrators ###


def euler_step(derivative, x, dt):
  """One forward-Euler step of `x' = derivative(x)`."""
  return x + dt * derivative(x)


def rk4_step(derivative, x, dt):
  """One classical fourth-order Runge-Kutta step of `x' = derivative(x)`."""
  k1 = derivative(x)
  k2 = derivative(x + 0.5 * dt * k1)
  k3 = derivative(x + 0.5 * dt * k2)
  k4 = derivative(x + dt * k3)
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


INTEGRATORS = {'rk4': rk4_step, 'euler': euler_step}


def get_integrator(name):
  try:
    return INTEGRATORS[name]
  except KeyError:
    raise ValueError('Unknown integrator {!r}; choose one of {}.'.format(
        name, sorted(INTEGRATORS)))


### Motors ###


class MotorModel(object):
  """A rotor motor: third-order plant plus a PID rate controller.

  The plant is `H(s) = b0 / (a3 s^3 + a2 s^2 + a1 s + a0)`, realized in
  controllable canonical form with state `x = (z, z', z'')` and output
  `omega = (b0 / a3) z`. It is discretized exactly (zero-order hold on the
  input) for each step size it is asked about.

  The controller combines a feed-forward term `desired / dc_gain` with a PID on
  the rate error. Its output is expressed as a PWM pulse width, clamped to
  `pwm_range`, and mapped linearly back to the plant input:

      u = (pwm - pwm_min) / (pwm_max - pwm_min) * max_input,

  where `max_input = max_rate / dc_gain` is the input that would hold the rotor
  at `max_rate` in steady state. The integrator is frozen while the command is
  saturated and the error pushes further into saturation.

  The default gains put the closed-loop poles near s = -100 and
  -44.75 +/- 49.6j, which settles a step to hover speed within 2% in about
  0.1 s without touching the PWM limits.
  """

  def __init__(self, coefficients=MOTOR_COEFFICIENTS, kp=0.1475, ki=0.01,
               kd=0.0, pwm_range=(1000.0, 2000.0), max_rate=1000.0):
    """Construct a `MotorModel`.

    Args:
      coefficients: `(a3, a2, a1, a0, b0)` of the motor transfer function.
      kp: proportional gain on rate error (plant input per rad/s).
      ki: integral gain.
      kd: derivative gain.
      pwm_range: `(pwm_min, pwm_max)` pulse widths in microseconds.
      max_rate: steady rotor rate (rad/s) reached at `pwm_max`.

    Raises:
      ValueError: coefficients are not five positive numbers, a gain is
          negative, `pwm_range` is not increasing, or `max_rate` is not
          positive.
    """
    coefficients = tuple(float(c) for c in coefficients)
    if len(coefficients) != 5 or any(c <= 0 for c in coefficients):
      raise ValueError('Motor coefficients must be five positive numbers '
                       '(a3, a2, a1, a0, b0); got {}.'.format(coefficients))
    if min(kp, ki, kd) < 0:
      raise ValueError('Motor PID gains must be non-negative.')
    pwm_min, pwm_max = (float(p) for p in pwm_range)
    if not pwm_min < pwm_max:
      raise ValueError('pwm_range must be increasing; got {}.'.format(
          pwm_range))
    if max_rate <= 0:
      raise ValueError('max_rate must be positive; got {}.'.format(max_rate))

    a3, a2, a1, a0, b0 = coefficients
    self._coefficients = coefficients
    self._denominator = np.array([a2, a1, a0]) / a3
    self._b0 = b0 / a3
    self._dc_gain = b0 / a0
    self.kp, self.ki, self.kd = float(kp), float(ki), float(kd)
    self._pwm_range = (pwm_min, pwm_max)
    self._max_rate = float(max_rate)
    self._max_input = self._max_rate / self._dc_gain
    self._discretized = {}

  @property
  def coefficients(self):
    return self._coefficients

  @property
  def dc_gain(self):
    """Open-loop steady-state rate per unit plant input, b0 / a0."""
    return self._dc_gain

  @property
  def max_input(self):
    return self._max_input

  @property
  def max_rate(self):
    return self._max_rate

  @property
  def pwm_range(self):
    return self._pwm_range

  def state_space(self):
    """Continuous `(A, B, C, D)` in controllable canonical form."""
    a2, a1, a0 = self._denominator
    a = np.array([[0.0, 1.0, 0.0],
                  [0.0, 0.0, 1.0],
                  [-a0, -a1, -a2]])
    b = np.array([[0.0], [0.0], [1.0]])
    c = np.array([[self._b0, 0.0, 0.0]])
    d = np.array([[0.0]])
    return a, b, c, d

  def discretize(self, dt):
    """Zero-order-hold matrices `(A_d, B_d, C_d)` for step `dt`.

    `B_d` and `C_d` are returned flattened to shape `(3,)`. Results are cached
    per step size.

    Raises:
      ValueError: `dt` is not positive.
    """
    if not dt > 0:
      raise ValueError('Motor step dt must be positive; got {}.'.format(dt))
    if dt not in self._discretized:
      a_d, b_d, c_d, _, _ = signal.cont2discrete(
          self.state_space(), dt, method='zoh')
      self._discretized[dt] = (a_d, b_d[:, 0].copy(), c_d[0].copy())
    return self._discretized[dt]

  def steady_filter_state(self, rate):
    """Filter state holding the rotor at `rate` with a constant input."""
    rate = np.asarray(rate, dtype=np.float64)
    state = np.zeros(rate.shape + (3,))
    state[..., 0] = rate / self._b0
    return state

  def input_to_pwm(self, plant_input):
    pwm_min, pwm_max = self._pwm_range
    return pwm_min + np.asarray(plant_input) / self._max_input * (
        pwm_max - pwm_min)

  def pwm_to_input(self, pwm):
    pwm_min, pwm_max = self._pwm_range
    return (np.asarray(pwm) - pwm_min) / (pwm_max - pwm_min) * self._max_input


DEFAULT_MOTOR_MODEL = MotorModel()


class MotorState(collections.namedtuple(
    'MotorState',
    ['filter_state', 'integral', 'previous_error', 'angular_rate'])):
  """State of one motor and its rate controller.

  * `filter_state`: the 3-vector state of the discretized transfer function.
  * `integral`: the PID integral of rate error (rad).
  * `previous_error`: the rate error at the last step (rad/s).
  * `angular_rate`: rotor angular rate omega (rad/s), never negative.
  """
  __slots__ = ()

  @classmethod
  def steady(cls, rate=0.0, model=DEFAULT_MOTOR_MODEL):
    """A motor spinning steadily at `rate` with idle controller memory."""
    if rate < 0:
      raise ValueError('Rotor rates must be non-negative; got {}.'.format(rate))
    return cls(model.steady_filter_state(float(rate)), 0.0, 0.0, float(rate))


class RotorSet(collections.namedtuple(
    'RotorSet',
    ['filter_state', 'integral', 'previous_error', 'angular_rate'])):
  """The four motors of the quadcopter, stacked.

  Fields mirror `MotorState` with a leading axis of length 4, so `motor_step`
  advances all four motors at once. Rotor `i` (1-based, as in the mixing
  matrix) is available through `motor(i)`.
  """
  __slots__ = ()

  @classmethod
  def from_motors(cls, motors):
    motors = list(motors)
    if len(motors) != 4:
      raise ValueError('A RotorSet needs exactly 4 motors; got {}.'.format(
          len(motors)))
    return cls(np.stack([np.asarray(m.filter_state, dtype=np.float64)
                         for m in motors]),
               np.array([m.integral for m in motors], dtype=np.float64),
               np.array([m.previous_error for m in motors], dtype=np.float64),
               np.array([m.angular_rate for m in motors], dtype=np.float64))

  @classmethod
  def steady(cls, rates, model=DEFAULT_MOTOR_MODEL):
    rates = np.broadcast_to(np.asarray(rates, dtype=np.float64), (4,))
    return cls.from_motors(MotorState.steady(r, model) for r in rates)

  def motor(self, index):
    """The `MotorState` of rotor `index`, counted from 1."""
    if not 1 <= index <= 4:
      raise IndexError('Rotors are numbered 1 to 4; got {}.'.format(index))
    i = index - 1
    return MotorState(self.filter_state[i].copy(), float(self.integral[i]),
                      float(self.previous_error[i]),
                      float(self.angular_rate[i]))


def _scalar_if_0d(value):
  value = np.asarray(value)
  return float(value) if value.ndim == 0 else value


def motor_step(motor, desired_rate, dt, model=DEFAULT_MOTOR_MODEL):
  """Advance a motor (or a whole `RotorSet`) by one step.

  Args:
    motor: a `MotorState`, or a `RotorSet` with one desired rate per rotor.
    desired_rate: commanded rotor rate(s), rad/s, non-negative.
    dt: step size in seconds.
    model: the `MotorModel` describing plant and controller.

  Returns:
    a new object of the same type as `motor`.

  Raises:
    ValueError: `dt` is not positive or a desired rate is negative.
  """
  if not dt > 0:
    raise ValueError('motor_step needs a positive dt; got {}.'.format(dt))
  desired = np.asarray(desired_rate, dtype=np.float64)
  if np.any(desired < 0):
    raise ValueError('Desired rotor rates must be non-negative; got {}.'.format(
        desired))
  a_d, b_d, c_d = model.discretize(dt)

  state = np.asarray(motor.filter_state, dtype=np.float64)
  rate = state.dot(c_d)
  error = desired - rate
  derivative = (error - np.asarray(motor.previous_error)) / dt
  candidate_integral = np.asarray(motor.integral) + error * dt
  command = (desired / model.dc_gain + model.kp * error +
             model.ki * candidate_integral + model.kd * derivative)

  pwm_min, pwm_max = model.pwm_range
  pwm = np.clip(model.input_to_pwm(command), pwm_min, pwm_max)
  applied = model.pwm_to_input(pwm)

  # Conditional integration.
  winding_up = (((command > model.max_input) & (error > 0)) |
                ((command < 0.0) & (error < 0)))
  integral = np.where(winding_up, motor.integral, candidate_integral)

  next_state = state.dot(a_d.T) + np.asarray(applied)[..., np.newaxis] * b_d
  next_rate = np.maximum(next_state.dot(c_d), 0.0)

  return type(motor)(next_state, _scalar_if_0d(integral),
                     _scalar_if_0d(error), _scalar_if_0d(next_rate))


### Rotor mixing ###


def mixing_matrix(params):
  """The 4x4 map from squared rotor rates to `(F, tau_phi, tau_theta, tau_psi)`.
  """
  k1, k2, arm = params.thrust_coeff, params.torque_coeff, params.arm_length
  return np.array([[k1, k1, k1, k1],
                   [0.0, -arm * k1, 0.0, arm * k1],
                   [arm * k1, 0.0, -arm * k1, 0.0],
                   [-k2, k2, -k2, k2]])


def mix_rotors(omega_squared, params):
  """Collective force and body torques from squared rotor rates.

  Returns:
    a 2-tuple `(F, torques)`: total thrust in N and a Vec3 of torques in N m.
  """
  omega_squared = np.asarray(omega_squared, dtype=np.float64)
  if omega_squared.shape != (4,):
    raise ValueError('mix_rotors needs four squared rates; got shape {}.'.format(
        omega_squared.shape))
  wrench = mixing_matrix(params).dot(omega_squared)
  return float(wrench[0]), wrench[1:]


class RotorAllocation(collections.namedtuple(
    'RotorAllocation', ['omega_squared', 'saturated'])):
  """Result of `allocate_rotors`.

  * `omega_squared`: four squared rotor rates, clamped at zero.
  * `saturated`: True if any rate had to be clamped, in which case mixing the
    result no longer reproduces the requested force and torques.
  """
  __slots__ = ()


def allocate_rotors(force, torques, params):
  """Squared rotor rates that realize a collective force and torques."""
  wrench = np.concatenate([[float(force)], vec3(torques, 'torques')])
  omega_squared = np.linalg.solve(mixing_matrix(params), wrench)
  saturated = bool(np.any(omega_squared < 0.0))
  return RotorAllocation(np.maximum(omega_squared, 0.0), saturated)


def hover_rotor_rate(params):
  """Rotor rate (rad/s) at which four rotors carry the vehicle's weight."""
  return float(np.sqrt(params.weight / (4.0 * params.thrust_coeff)))


### Rotor aerodynamics ###


class InducedVelocity(collections.namedtuple(
    'InducedVelocity', ['velocity', 'iterations', 'converged', 'method'])):
  """Solution of the implicit induced-velocity equation.

  * `velocity`: the induced velocity v_i (m/s).
  * `iterations`: fixed-point iterations spent.
  * `converged`: whether the fixed-point iteration met its tolerance.
  * `method`: `'fixed_point'`, or `'bisection'` when the bracketing fallback
    produced the answer.
  """
  __slots__ = ()


def induced_velocity(body_airspeed_vector, v_h, damping=0.5,
                     max_iterations=50, tolerance=1e-10):
  """Solve v_i = v_h^2 / sqrt(u^2 + v^2 + (v_i + w)^2) for v_i > 0.

  Starts a damped fixed-point iteration at `v_h`. If that fails to converge
  within `max_iterations`, falls back to a bracketing root search on
  `v_i sqrt(u^2 + v^2 + (v_i + w)^2) - v_h^2` over `(0, upper]`.

  Args:
    body_airspeed_vector: `(u, v, w)` body-frame airspeed, m/s.
    v_h: hover induced velocity, m/s.
    damping: fixed-point relaxation factor in (0, 1].
    max_iterations: fixed-point iteration cap.
    tolerance: step-size tolerance for the iteration and the fallback.

  Returns:
    an `InducedVelocity`.

  Raises:
    ValueError: `v_h` is not positive or `damping` is outside (0, 1].
    InducedVelocityError: the fallback could not bracket a root.
  """
  if not v_h > 0:
    raise ValueError('v_h must be positive; got {}.'.format(v_h))
  if not 0 < damping <= 1:
    raise ValueError('damping must lie in (0, 1]; got {}.'.format(damping))
  u, v, w = vec3(body_airspeed_vector, 'body airspeed')
  horizontal_sq = u * u + v * v
  v_h_sq = v_h * v_h

  v_i = float(v_h)
  for iteration in six.moves.range(1, max_iterations + 1):
    radius = np.sqrt(horizontal_sq + (v_i + w) ** 2)
    if radius == 0.0:
      break
    updated = (1.0 - damping) * v_i + damping * v_h_sq / radius
    if abs(updated - v_i) < tolerance:
      return InducedVelocity(float(updated), iteration, True, 'fixed_point')
    v_i = updated

  def residual(x):
    return x * np.sqrt(horizontal_sq + (x + w) ** 2) - v_h_sq

  upper = float(v_h)
  for _ in six.moves.range(64):
    if residual(upper) > 0:
      break
    upper *= 2.0
  else:
    raise InducedVelocityError(
        'Could not bracket the induced velocity for airspeed {}.'.format(
            (u, v, w)))
  root = optimize.brentq(residual, 0.0, upper, xtol=tolerance)
  return InducedVelocity(float(root), max_iterations, False, 'bisection')


def thrust_correction_ratio(v_i, w, cap=THRUST_CORRECTION_CAP):
  """The factor `v_i / (v_i + w)`, limited to `cap`."""
  denominator = v_i + w
  if denominator <= v_i / cap:
    return float(cap)
  return float(v_i / denominator)


def corrected_thrust(thrust, body_airspeed_vector, v_h):
  """Rotor thrust corrected for air-relative flow through the disk.

  Args:
    thrust: uncorrected thrust `k1 omega^2`, N, non-negative.
    body_airspeed_vector: `(u, v, w)` in m/s.
    v_h: hover induced velocity, m/s.

  Returns:
    `T v_i / (v_i + w)` in N.

  Raises:
    ValueError: `thrust` is negative or `v_h` is not positive.
  """
  if thrust < 0:
    raise ValueError('Thrust must be non-negative; got {}.'.format(thrust))
  if thrust == 0:
    return 0.0
  airspeed = vec3(body_airspeed_vector, 'body airspeed')
  solution = induced_velocity(airspeed, v_h)
  return thrust * thrust_correction_ratio(solution.velocity, airspeed[2])


def blade_flapping(thrust, u, v, flapping_coeff):
  """Body-frame thrust vector of a rotor tilted by blade flapping.

  The rotor plane tilts by `alpha = K_f sqrt(u^2 + v^2)` towards the
  horizontal airspeed; the thrust magnitude is unchanged.

  Returns:
    Vec3 `(T_x, T_y, T_z)`, `T_z` along the rotor axis.
  """
  if thrust < 0:
    raise ValueError('Thrust must be non-negative; got {}.'.format(thrust))
  speed = np.hypot(u, v)
  if speed < FLAPPING_EPSILON:
    return np.array([0.0, 0.0, float(thrust)])
  alpha = flapping_coeff * speed
  tilt = np.sin(alpha) / speed
  return float(thrust) * np.array([u * tilt, v * tilt, np.cos(alpha)])


class RotorForces(collections.namedtuple(
    'RotorForces', ['thrust_vector', 'torques', 'induced', 'correction'])):
  """Aerodynamic output of the four rotors for one step.

  * `thrust_vector`: total body-frame thrust after both corrections.
  * `torques`: body torques; roll and pitch scale with the thrust correction.
  * `induced`: the `InducedVelocity` solution used.
  * `correction`: the common thrust correction ratio.
  """
  __slots__ = ()


def rotor_forces(angular_rates, state, wind, params):
  """Combine mixing, thrust correction and blade flapping for all rotors.

  All rotors see the body airspeed at the centre of mass, so the correction
  ratio and flapping angle are shared and apply to the summed thrust.
  """
  omega = np.asarray(angular_rates, dtype=np.float64)
  force, torques = mix_rotors(omega * omega, params)
  u, v, w = body_airspeed(state, wind)
  solution = induced_velocity((u, v, w), params.hover_induced_velocity)
  ratio = thrust_correction_ratio(solution.velocity, w)
  torques = torques * np.array([ratio, ratio, 1.0])
  thrust_vector = blade_flapping(force * ratio, u, v, params.flapping_coeff)
  return RotorForces(thrust_vector, torques, solution, ratio)
