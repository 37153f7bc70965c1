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

"""The quadwind simulation engine.

All details are in the docstring for `Simulator`; `simulate` wraps the whole
lifecycle in one call.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np

from quadwind import control
from quadwind import plot
from quadwind import quadsim
from quadwind import recording
from quadwind import wind
from quadwind.protocols import logging as qw_logging

import six


class Simulator(object):
  """The quadwind simulation engine.

  Simulators are "configure once, then run": first you give the simulator a
  wind field, a controller and (optionally) an initial state and motor model;
  then you call `arm()`, which locks the configuration, seeds the wind and
  spins the rotors up to hover. After that, `step()` advances the simulation
  by one fixed time step and `run()` advances it for a duration while logging
  samples into a `recording.TrajectoryLog`.

  Each step does, in order:

  1. sample the wind at the current position and time;
  2. ask the controller for a collective force and body torques;
  3. allocate them to squared rotor rates (clamping and reporting
     saturation);
  4. advance the four motors towards those rates;
  5. compute rotor thrust and torques from the actual rotor rates, with the
     induced-velocity correction and blade flapping;
  6. integrate the rigid body over the step with thrust and torques held
     fixed (drag is re-evaluated inside the integrator stages);
  7. abort with `quadsim.DivergenceError` if any state entry is not finite or
     exceeds `divergence_bound` in magnitude.

  Controllers need a `reset()` method and a `command(state, params, dt)`
  method returning `(force, torques)`; `control.WaypointController` is the
  one quadwind provides.

  The simulator, its wind field and its controller share a `Plot` object,
  available as `the_plot`. The simulator logs rotor saturation onsets and
  recoveries and induced-velocity fallbacks there, and counts them under the
  events `'saturated_steps'` and `'induced_velocity_fallbacks'`.
  """

  def __init__(self, params=None, dt=0.001, integrator='rk4',
               divergence_bound=1e4):
    """Construct a new `Simulator`.

    Args:
      params: `quadsim.QuadParams`; defaults to the package airframe.
      dt: fixed time step, s.
      integrator: name of a `quadsim` integrator, `'rk4'` or `'euler'`.
      divergence_bound: largest admissible magnitude of any state entry.

    Raises:
      ValueError: `dt` or `divergence_bound` is not positive, or the
          integrator is unknown.
    """
    if not dt > 0:
      raise ValueError('The simulation step dt must be positive; got {}.'.format(
          dt))
    if not divergence_bound > 0:
      raise ValueError('divergence_bound must be positive; got {}.'.format(
          divergence_bound))
    self._params = params if params is not None else quadsim.QuadParams()
    self._dt = float(dt)
    self._integrator_name = integrator
    self._integrator = quadsim.get_integrator(integrator)
    self._divergence_bound = float(divergence_bound)

    self._wind = None
    self._controller = None
    self._state = quadsim.QuadState.at_rest()
    self._initial_rates = None
    self._motor_model = quadsim.DEFAULT_MOTOR_MODEL

    # True iff arm() has been called.
    self._armed = False
    self._the_plot = plot.Plot()
    self._steps = 0
    self._rotors = None
    self._saturated = False

  def set_wind(self, wind_field):
    """Set the `wind.WindField` the vehicle flies through.

    Raises:
      RuntimeError: the simulator is already armed.
      TypeError: `wind_field` is not a `wind.WindField`.
    """
    self._runtime_error_if_called_while_armed('set_wind')
    if not isinstance(wind_field, wind.WindField):
      raise TypeError('Simulator.set_wind needs a WindField; got a {}.'.format(
          type(wind_field).__name__))
    self._wind = wind_field

  def set_controller(self, controller):
    """Set the controller; see the class docstring for its interface.

    Raises:
      RuntimeError: the simulator is already armed.
    """
    self._runtime_error_if_called_while_armed('set_controller')
    self._controller = controller

  def set_initial_state(self, state, rotor_rates=None):
    """Set the initial `quadsim.QuadState` and optionally the rotor rates.

    Rotors start in steady state at `rotor_rates` (rad/s), or at the hover
    rate when that is None.

    Raises:
      RuntimeError: the simulator is already armed.
    """
    self._runtime_error_if_called_while_armed('set_initial_state')
    self._state = state
    self._initial_rates = rotor_rates

  def set_motor_model(self, motor_model):
    """Replace the default `quadsim.MotorModel`.

    Raises:
      RuntimeError: the simulator is already armed.
    """
    self._runtime_error_if_called_while_armed('set_motor_model')
    self._motor_model = motor_model

  def arm(self, seed=None):
    """Lock the configuration and get ready to step.

    Hands the wind field the step and the `Plot`, reseeds it with `seed`,
    resets the controller and spins up the rotors.

    Args:
      seed: seed for every random process in the run.

    Raises:
      RuntimeError: called twice, or no wind field or controller was set.
    """
    self._runtime_error_if_called_while_armed('arm')
    if self._wind is None:
      raise RuntimeError('Simulator.arm() needs a wind field; call set_wind() '
                         'first.')
    if self._controller is None:
      raise RuntimeError('Simulator.arm() needs a controller; call '
                         'set_controller() first.')
    self._armed = True
    self._wind.prepare(self._dt, self._the_plot)
    self._wind.reset(seed)
    self._controller.reset()
    rates = (quadsim.hover_rotor_rate(self._params)
             if self._initial_rates is None else self._initial_rates)
    self._rotors = quadsim.RotorSet.steady(rates, self._motor_model)
    self._the_plot['seed'] = seed

  def step(self):
    """Advance the simulation by one time step.

    Returns:
      the wind (Vec3, NED, m/s) sampled at the start of the step.

    Raises:
      RuntimeError: the simulator is not armed yet.
      quadsim.DivergenceError: the state blew up during the step.
      quadsim.SimulationError: the controller could not produce a command.
    """
    if not self._armed:
      raise RuntimeError('step() cannot be called until the Simulator is '
                         'armed via the arm() method.')
    t = self.time
    self._the_plot._advance_clock(t)  # pylint: disable=protected-access
    state, params = self._state, self._params

    wind_now = np.asarray(self._wind.sample(state.position, t),
                          dtype=np.float64)
    force, torques = self._controller.command(state, params, self._dt)
    allocation = quadsim.allocate_rotors(force, torques, params)
    self._note_saturation(allocation.saturated, t)

    self._rotors = quadsim.motor_step(
        self._rotors, np.sqrt(allocation.omega_squared), self._dt,
        self._motor_model)
    forces = quadsim.rotor_forces(self._rotors.angular_rate, state, wind_now,
                                  params)
    if forces.induced.method != 'fixed_point':
      self._the_plot.count('induced_velocity_fallbacks')
      self._the_plot.log('t={:.3f} s: induced velocity needed the bracketing '
                         'fallback.'.format(t))

    def derivative(vector):
      return quadsim.rigid_body_derivative(
          quadsim.QuadState.from_vector(vector), forces.thrust_vector,
          forces.torques, wind_now, params).as_vector()

    vector = self._integrator(derivative, state.as_vector(), self._dt)
    self._steps += 1
    if (not np.all(np.isfinite(vector)) or
        np.max(np.abs(vector)) > self._divergence_bound):
      self._the_plot.log('t={:.3f} s: state diverged; aborting.'.format(
          self.time))
      raise quadsim.DivergenceError(self.time)
    self._state = quadsim.QuadState.from_vector(vector)
    return wind_now

  def run(self, duration, log_rate=10.0):
    """Step for `duration` seconds, logging at `log_rate` Hz.

    Samples are taken at the start of every logging tick and once more at
    the end, so a run of `duration` seconds at 10 Hz from time zero yields
    `10 duration + 1` samples.

    Args:
      duration: simulated time, s, positive.
      log_rate: samples per second; `1 / (log_rate dt)` must be a whole
          number.

    Returns:
      a `recording.TrajectoryLog` of time, position, attitude and true wind.

    Raises:
      ValueError: `duration` is not positive or `log_rate` does not divide
          the step rate.
    """
    if not duration > 0:
      raise ValueError('duration must be positive; got {}.'.format(duration))
    stride = steps_per_sample(self._dt, log_rate)
    total = int(round(duration / self._dt))

    times, positions, attitudes, winds = [], [], [], []
    for index in six.moves.range(total):
      if index % stride == 0:
        times.append(self.time)
        positions.append(self._state.position)
        attitudes.append(self._state.attitude)
        winds.append(self.step())
      else:
        self.step()
    if total % stride == 0:
      times.append(self.time)
      positions.append(self._state.position)
      attitudes.append(self._state.attitude)
      winds.append(np.asarray(self._wind.sample(self._state.position,
                                                self.time), dtype=np.float64))
    return recording.TrajectoryLog(times, positions, attitudes, winds,
                                   self._log_metadata(log_rate))

  @property
  def the_plot(self):
    return self._the_plot

  @property
  def state(self):
    return self._state

  @property
  def rotors(self):
    return self._rotors

  @property
  def time(self):
    """Current simulation time, s."""
    return self._steps * self._dt

  @property
  def dt(self):
    return self._dt

  @property
  def params(self):
    return self._params

  @property
  def armed(self):
    return self._armed

  def _note_saturation(self, saturated, t):
    if saturated:
      self._the_plot.count('saturated_steps')
      if not self._saturated:
        self._the_plot.log('t={:.3f} s: rotor allocation saturated.'.format(t))
    elif self._saturated:
      self._the_plot.log('t={:.3f} s: rotor allocation back within '
                         'limits.'.format(t))
    self._saturated = saturated

  def _log_metadata(self, log_rate):
    description = self._wind.describe()
    return {'seed': self._the_plot.get('seed'),
            'dt': self._dt,
            'log_rate': float(log_rate),
            'integrator': self._integrator_name,
            'wind': description.get('kind')}

  def _runtime_error_if_called_while_armed(self, method_name):
    if self._armed:
      raise RuntimeError('{}() cannot be called after the Simulator has been '
                         'armed.'.format(method_name))


def steps_per_sample(dt, log_rate):
  """Number of simulation steps between log samples.

  Raises:
    ValueError: `log_rate` is not positive or does not divide `1 / dt`.
  """
  if not log_rate > 0:
    raise ValueError('log_rate must be positive; got {}.'.format(log_rate))
  ratio = 1.0 / (log_rate * dt)
  stride = int(round(ratio))
  if stride < 1 or abs(ratio - stride) > 1e-6 * ratio:
    raise ValueError('A log rate of {} Hz does not divide the step rate of {} '
                     'Hz.'.format(log_rate, 1.0 / dt))
  return stride


def simulate(params, gains, wind_field, waypoint, duration, dt=0.001,
             log_rate=10.0, seed=None, integrator='rk4', initial_state=None,
             motor_model=None, divergence_bound=1e4, the_plot=None):
  """Fly to `waypoint` through `wind_field` and log the flight.

  Args:
    params: `quadsim.QuadParams`.
    gains: `control.ControlGains`.
    wind_field: a `wind.WindField`.
    waypoint: NED waypoint, m.
    duration: simulated time, s.
    dt: step, s.
    log_rate: samples per second.
    seed: seed for the wind field's random processes. The same seed and
        configuration give bit-identical logs.
    integrator: `'rk4'` or `'euler'`.
    initial_state: a `quadsim.QuadState`; default at rest at the origin.
    motor_model: a `quadsim.MotorModel`; default `DEFAULT_MOTOR_MODEL`.
    divergence_bound: see `Simulator`.
    the_plot: optional `Plot`; messages and counters of the run are copied
        into it when the run ends, successfully or not.

  Returns:
    a `recording.TrajectoryLog`.

  Raises:
    quadsim.DivergenceError: the state blew up; `.time` says when.
  """
  simulator = Simulator(params, dt, integrator, divergence_bound)
  simulator.set_wind(wind_field)
  simulator.set_controller(control.WaypointController(waypoint, gains))
  if initial_state is not None:
    simulator.set_initial_state(initial_state)
  if motor_model is not None:
    simulator.set_motor_model(motor_model)
  simulator.arm(seed)
  try:
    log = simulator.run(duration, log_rate)
  finally:
    if the_plot is not None:
      _merge_plot(simulator.the_plot, the_plot)
  log.metadata['waypoint'] = ','.join('{:g}'.format(x) for x in waypoint)
  return log


def _merge_plot(source, destination):
  qw_logging.relay(source, destination)
  for event, total in six.iteritems(source.counts):
    destination.count(event, total)
