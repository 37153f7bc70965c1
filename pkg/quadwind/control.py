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

"""Waypoint navigation and attitude control.

Two cascaded controllers fly the quadcopter to a fixed waypoint:

1. `waypoint_control`, a saturated PID on position error, produces desired
   roll and pitch angles, a yaw to hold, and a desired vertical acceleration;
2. `attitude_control`, a feedback-linearized PD on Euler-angle error, turns
   these into a collective force and body torques.

Signs. Position errors are `e_p = p^d - p` in NED. With the thrust acting
along `-R e3`, a positive roll accelerates the vehicle east and a positive
pitch accelerates it *south*, so the desired pitch is the negated, saturated
PID on the north error. The vertical channel returns the desired *upward*
acceleration `a`, which enters the collective thrust as `m (g + a)`; it is
the negated PID on the down error. The horizontal channels assume the
constant (zero) yaw the whole package flies with.

`WaypointController` packages both for the `Simulator`.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections

import numpy as np

from quadwind import quadsim


class GimbalError(quadsim.SimulationError):
  """The attitude is too close to +/-90 degrees to compute a thrust command."""


class ControlGains(collections.namedtuple(
    'ControlGains', ['position_kp', 'position_kd', 'position_ki',
                     'attitude_k', 'attitude_kp', 'attitude_kd',
                     'roll_limit', 'pitch_limit', 'integral_limit'])):
  """Gains and limits of the waypoint and attitude controllers.

  Position gains `kp, kd, ki` are shared by all three axes. Attitude gains
  `K, Kp, Kd` are Vec3s for roll, pitch and yaw. Defaults: kp = 0.3,
  kd = 0.25, ki = 0.0002, K = (21.93, 21.93, 48), Kp = (4.65, 4.65, 3.77),
  Kd = (0.1872, 0.1872, 0.1496), roll and pitch limits 0.8 rad, and an
  integral clamp of 50 m s on each axis.
  """
  __slots__ = ()

  def __new__(cls, position_kp=0.3, position_kd=0.25, position_ki=0.0002,
              attitude_k=(21.93, 21.93, 48.0),
              attitude_kp=(4.65, 4.65, 3.77),
              attitude_kd=(0.1872, 0.1872, 0.1496),
              roll_limit=0.8, pitch_limit=0.8, integral_limit=50.0):
    attitude_k = quadsim.vec3(attitude_k, 'attitude_k')
    attitude_kp = quadsim.vec3(attitude_kp, 'attitude_kp')
    attitude_kd = quadsim.vec3(attitude_kd, 'attitude_kd')
    scalars = (('position_kp', position_kp), ('position_kd', position_kd),
               ('position_ki', position_ki))
    for name, value in scalars:
      if value < 0:
        raise ValueError('{} must be non-negative; got {}.'.format(name, value))
    for name, value in (('attitude_k', attitude_k),
                        ('attitude_kp', attitude_kp),
                        ('attitude_kd', attitude_kd)):
      if np.any(value < 0):
        raise ValueError('{} must be non-negative; got {}.'.format(name, value))
    for name, value in (('roll_limit', roll_limit),
                        ('pitch_limit', pitch_limit)):
      if not 0 < value < np.pi / 2:
        raise ValueError('{} must lie in (0, pi/2); got {}.'.format(
            name, value))
    if not integral_limit > 0:
      raise ValueError('integral_limit must be positive; got {}.'.format(
          integral_limit))
    return super(ControlGains, cls).__new__(
        cls, float(position_kp), float(position_kd), float(position_ki),
        attitude_k, attitude_kp, attitude_kd, float(roll_limit),
        float(pitch_limit), float(integral_limit))


class WaypointControllerState(collections.namedtuple(
    'WaypointControllerState', ['integral', 'yaw_reference'])):
  """Memory of the waypoint controller.

  * `integral`: running integrals of `(e_pn, e_pe, e_pd)`, m s, each clamped
    to the gains' `integral_limit`.
  * `yaw_reference`: the yaw held for the whole flight, or None until the
    first call of `waypoint_control` latches the current yaw.
  """
  __slots__ = ()

  @classmethod
  def initial(cls):
    return cls(np.zeros(3), None)


class WaypointCommand(collections.namedtuple(
    'WaypointCommand', ['roll', 'pitch', 'yaw', 'vertical_acceleration'])):
  """Desired attitude (rad) and upward acceleration (m/s^2)."""
  __slots__ = ()


def sat(x, x_max):
  """Clamp `x` to `[-x_max, x_max]`."""
  if not x_max > 0:
    raise ValueError('sat needs a positive limit; got {}.'.format(x_max))
  return float(min(max(x, -x_max), x_max))


def waypoint_control(state, waypoint, ctrl_state, gains, dt):
  """Saturated PID from position error to desired attitude and acceleration.

  Args:
    state: current `quadsim.QuadState`.
    waypoint: desired NED position, Vec3.
    ctrl_state: `WaypointControllerState` from the previous call.
    gains: `ControlGains`.
    dt: controller time step, s.

  Returns:
    a 2-tuple `(command, new_ctrl_state)`: a `WaypointCommand` and the
    advanced `WaypointControllerState`.

  Raises:
    ValueError: `dt` is not positive.
  """
  if not dt > 0:
    raise ValueError('waypoint_control needs a positive dt; got {}.'.format(dt))
  error = quadsim.vec3(waypoint, 'waypoint') - state.position
  error_rate = -state.velocity
  limit = gains.integral_limit
  integral = np.clip(np.asarray(ctrl_state.integral) + error * dt,
                     -limit, limit)

  pid = gains.position_kp * error + gains.position_kd * error_rate + (
      gains.position_ki * integral)
  roll = sat(pid[1], gains.roll_limit)
  pitch = -sat(pid[0], gains.pitch_limit)
  upward_acceleration = -float(pid[2])

  yaw = ctrl_state.yaw_reference
  if yaw is None:
    yaw = float(state.attitude[2])

  return (WaypointCommand(roll, pitch, yaw, upward_acceleration),
          WaypointControllerState(integral, yaw))


def attitude_control(state, desired, params, gains, epsilon=1e-3):
  """Feedback-linearized PD attitude control.

  Args:
    state: current `quadsim.QuadState`.
    desired: a `WaypointCommand` (or any 4-sequence of roll, pitch, yaw and
        upward acceleration).
    params: `quadsim.QuadParams`.
    gains: `ControlGains`.
    epsilon: smallest admissible `|cos(phi) cos(theta)|`.

  Returns:
    a 2-tuple `(F, torques)`: collective thrust in N and a Vec3 of torques.

  Raises:
    GimbalError: `|cos(phi) cos(theta)| < epsilon`.
  """
  roll_d, pitch_d, yaw_d, upward_acceleration = desired
  phi, theta, _ = state.attitude
  tilt_cosine = np.cos(phi) * np.cos(theta)
  if abs(tilt_cosine) < epsilon:
    raise GimbalError(
        'Attitude (phi={:.4f}, theta={:.4f}) is too close to the gimbal '
        'singularity.'.format(phi, theta))

  force = params.mass * (params.gravity + upward_acceleration) / tilt_cosine

  j_x, j_y, j_z = params.inertia
  d_phi, d_theta, d_psi = state.angular_rate
  error = np.array([roll_d, pitch_d, yaw_d]) - state.attitude
  error_rate = -state.angular_rate
  gyroscopic = np.array([(j_y - j_z) / j_x * d_theta * d_psi,
                         (j_z - j_x) / j_y * d_phi * d_psi,
                         (j_x - j_y) / j_z * d_phi * d_theta])
  torques = (params.inertia * (-gains.attitude_k * state.angular_rate -
                               gyroscopic) +
             gains.attitude_kp * error + gains.attitude_kd * error_rate)
  return float(force), torques


class WaypointController(object):
  """Flies to a fixed waypoint; the controller a `Simulator` steps.

  Holds the waypoint, the gains and the `WaypointControllerState` between
  steps. Each call to `command` returns the force and torques to allocate to
  the rotors and records the latest `WaypointCommand` in `last_command`.
  """

  def __init__(self, waypoint, gains=None):
    self._waypoint = quadsim.vec3(waypoint, 'waypoint')
    self._gains = gains if gains is not None else ControlGains()
    self._ctrl_state = WaypointControllerState.initial()
    self.last_command = None

  @property
  def waypoint(self):
    return self._waypoint

  @property
  def gains(self):
    return self._gains

  @property
  def ctrl_state(self):
    return self._ctrl_state

  def reset(self):
    self._ctrl_state = WaypointControllerState.initial()
    self.last_command = None

  def command(self, state, params, dt):
    self.last_command, self._ctrl_state = waypoint_control(
        state, self._waypoint, self._ctrl_state, self._gains, dt)
    return attitude_control(state, self.last_command, params, self._gains)
