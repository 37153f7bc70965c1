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

"""Tests of the quadcopter physics."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import unittest

import numpy as np
from scipy import optimize

from quadwind import quadsim
from quadwind.tests import test_utils as tu

import six


class DragTest(tu.QuadwindTestCase):

  def testDragCoefficientClosedForm(self):
    self.assertAlmostEqual(quadsim.drag_coefficient(0.0),
                           0.2 + 0.9 * np.exp(-2.0), places=12)
    self.assertAlmostEqual(quadsim.drag_coefficient(0.0), 0.3218, places=4)
    self.assertAlmostEqual(quadsim.drag_coefficient(5.0), 0.2061, places=4)
    self.assertAlmostEqual(quadsim.drag_coefficient(1e6), 0.2, places=12)
    self.assertVectorsClose(quadsim.drag_coefficient([0.0, 5.0]),
                            [0.2 + 0.9 * np.exp(-2.0),
                             0.2 + 0.9 * np.exp(-5.0)])

  def testDragForce(self):
    self.assertVectorsClose(quadsim.drag_force([0, 0, 0], [0, 0, 0]),
                            np.zeros(3))
    self.assertVectorsClose(quadsim.drag_force([1, 0, 0], [0, 0, 0]),
                            [quadsim.drag_coefficient(1.0), 0.0, 0.0])
    self.assertVectorsClose(quadsim.drag_force([3, -1, 2], [3, -1, 2]),
                            np.zeros(3))

  def testDragForceIsAntisymmetric(self):
    random_state = np.random.RandomState(4)
    for _ in six.moves.range(20):
      a, b = random_state.normal(scale=5.0, size=(2, 3))
      self.assertVectorsClose(quadsim.drag_force(a, b),
                              -quadsim.drag_force(b, a), rtol=1e-12)


class RigidBodyTest(tu.QuadwindTestCase):

  def setUp(self):
    self.params = quadsim.QuadParams()
    self.weight = self.params.mass * self.params.gravity

  def testHoverIsAnEquilibrium(self):
    state = quadsim.QuadState.at_rest((0.0, 0.0, -10.0))
    derivative = quadsim.rigid_body_derivative(
        state, [0.0, 0.0, self.weight], np.zeros(3), np.zeros(3), self.params)
    self.assertVectorsClose(derivative.velocity, np.zeros(3), atol=1e-12)
    self.assertVectorsClose(derivative.angular_rate, np.zeros(3), atol=1e-12)
    self.assertVectorsClose(derivative.position, np.zeros(3))

  def testHeadwindPushesNorth(self):
    state = quadsim.QuadState.at_rest()
    derivative = quadsim.rigid_body_derivative(
        state, [0.0, 0.0, self.weight], np.zeros(3), [1.0, 0.0, 0.0],
        self.params)
    self.assertVectorsClose(
        derivative.velocity,
        [quadsim.drag_coefficient(1.0) / self.params.mass, 0.0, 0.0],
        atol=1e-12)

  def testFreeFall(self):
    derivative = quadsim.rigid_body_derivative(
        quadsim.QuadState.at_rest(), np.zeros(3), np.zeros(3), np.zeros(3),
        self.params)
    self.assertVectorsClose(derivative.velocity, [0.0, 0.0, 9.81])

  def testThrustProjectionMatchesRotatedAxis(self):
    attitude = np.array([0.1, -0.2, 0.3])
    phi, theta, psi = attitude
    state = quadsim.QuadState(np.zeros(3), np.zeros(3), attitude, np.zeros(3))
    derivative = quadsim.rigid_body_derivative(
        state, [0.0, 0.0, 10.0], np.zeros(3), np.zeros(3), self.params)
    expected_north = -10.0 * (np.cos(phi) * np.sin(theta) * np.cos(psi) +
                              np.sin(phi) * np.sin(psi)) / self.params.mass
    self.assertAlmostEqual(derivative.velocity[0], expected_north, places=12)

  def testGyroscopicCoupling(self):
    state = quadsim.QuadState(np.zeros(3), np.zeros(3), np.zeros(3),
                              np.array([0.0, 2.0, 3.0]))
    derivative = quadsim.rigid_body_derivative(
        state, np.zeros(3), np.zeros(3), np.zeros(3), self.params)
    j_x, j_y, j_z = self.params.inertia
    self.assertAlmostEqual(derivative.angular_rate[0],
                           (j_y - j_z) / j_x * 6.0, places=12)

  def testParamsValidation(self):
    with self.assertRaises(ValueError):
      quadsim.QuadParams(mass=0.0)
    with self.assertRaises(ValueError):
      quadsim.QuadParams(inertia=(0.1, -0.1, 0.1))
    self.assertAlmostEqual(self.params.hover_induced_velocity, 5.7278,
                           places=3)


class IntegratorTest(tu.QuadwindTestCase):

  def _error(self, step, dt):
    x, t = np.array([1.0]), 0.0
    while t < 1.0 - 1e-12:
      x = step(lambda y: -y, x, dt)
      t += dt
    return abs(x[0] - np.exp(-1.0))

  def testConvergenceOrders(self):
    rk4_ratio = self._error(quadsim.rk4_step, 0.1) / self._error(
        quadsim.rk4_step, 0.05)
    euler_ratio = self._error(quadsim.euler_step, 0.01) / self._error(
        quadsim.euler_step, 0.005)
    self.assertGreater(rk4_ratio, 14.0)
    self.assertLess(rk4_ratio, 18.0)
    self.assertGreater(euler_ratio, 1.8)
    self.assertLess(euler_ratio, 2.2)

  def testGetIntegrator(self):
    self.assertIs(quadsim.get_integrator('rk4'), quadsim.rk4_step)
    with self.assertRaises(ValueError):
      quadsim.get_integrator('leapfrog')


class MotorTest(tu.QuadwindTestCase):

  def testDcGain(self):
    self.assertAlmostEqual(quadsim.DEFAULT_MOTOR_MODEL.dc_gain,
                           2057342.0 / 142834.0, places=12)
    self.assertAlmostEqual(quadsim.DEFAULT_MOTOR_MODEL.dc_gain, 14.403,
                           places=3)

  def testSteadyRateIsAFixedPoint(self):
    motor = quadsim.MotorState.steady(271.2)
    for _ in six.moves.range(100):
      motor = quadsim.motor_step(motor, 271.2, 0.001)
    self.assertAlmostEqual(motor.angular_rate, 271.2, places=6)

  def testStepSettlesWithinTwoPercent(self):
    motor = quadsim.MotorState.steady(0.0)
    rates = []
    for _ in six.moves.range(400):
      motor = quadsim.motor_step(motor, 271.2, 0.001)
      rates.append(motor.angular_rate)
    settled = np.array(rates[199:])
    self.assertTrue(np.all(np.abs(settled - 271.2) <= 0.02 * 271.2),
                    'Worst late error {:.3f} rad/s'.format(
                        np.max(np.abs(settled - 271.2))))

  def testRatesStayNonNegative(self):
    motor = quadsim.MotorState.steady(500.0)
    for _ in six.moves.range(200):
      motor = quadsim.motor_step(motor, 0.0, 0.001)
      self.assertGreaterEqual(motor.angular_rate, 0.0)

  def testRotorSetMatchesSingleMotors(self):
    rotors = quadsim.RotorSet.steady([100.0, 200.0, 300.0, 400.0])
    singles = [rotors.motor(i) for i in six.moves.range(1, 5)]
    desired = np.array([150.0, 150.0, 250.0, 450.0])
    rotors = quadsim.motor_step(rotors, desired, 0.001)
    for i, motor in enumerate(singles):
      stepped = quadsim.motor_step(motor, desired[i], 0.001)
      self.assertAlmostEqual(rotors.angular_rate[i], stepped.angular_rate,
                             places=10)
    with self.assertRaises(IndexError):
      rotors.motor(0)

  def testRejectsBadArguments(self):
    motor = quadsim.MotorState.steady(0.0)
    with self.assertRaises(ValueError):
      quadsim.motor_step(motor, 100.0, 0.0)
    with self.assertRaises(ValueError):
      quadsim.motor_step(motor, -1.0, 0.001)
    with self.assertRaises(ValueError):
      quadsim.MotorModel(pwm_range=(2000.0, 1000.0))


class MixingTest(tu.QuadwindTestCase):

  def setUp(self):
    self.params = quadsim.QuadParams()

  def testMixRotors(self):
    force, torques = quadsim.mix_rotors([10.0] * 4, self.params)
    self.assertAlmostEqual(force, 4 * 5e-5 * 10.0)
    self.assertVectorsClose(torques, np.zeros(3), atol=1e-15)
    _, torques = quadsim.mix_rotors([10.0, 0.0, 10.0, 0.0], self.params)
    self.assertVectorsClose(torques, [0.0, 0.0, -2 * 5e-5 * 10.0], atol=1e-15)
    force, torques = quadsim.mix_rotors(np.zeros(4), self.params)
    self.assertEqual(force, 0.0)
    self.assertVectorsClose(torques, np.zeros(3))

  def testHoverAllocation(self):
    allocation = quadsim.allocate_rotors(14.715, np.zeros(3), self.params)
    self.assertFalse(allocation.saturated)
    self.assertVectorsClose(allocation.omega_squared, [73575.0] * 4)
    self.assertAlmostEqual(np.sqrt(allocation.omega_squared[0]), 271.2,
                           places=1)
    self.assertAlmostEqual(quadsim.hover_rotor_rate(self.params),
                           np.sqrt(73575.0), places=6)

  def testAllocationInvertsMixing(self):
    random_state = np.random.RandomState(0)
    for _ in six.moves.range(50):
      omega_squared = random_state.uniform(1e3, 1e5, size=4)
      force, torques = quadsim.mix_rotors(omega_squared, self.params)
      allocation = quadsim.allocate_rotors(force, torques, self.params)
      self.assertFalse(allocation.saturated)
      self.assertVectorsClose(allocation.omega_squared, omega_squared,
                              rtol=1e-10)

  def testSaturationIsFlagged(self):
    allocation = quadsim.allocate_rotors(0.0, [1.0, 0.0, 0.0], self.params)
    self.assertTrue(allocation.saturated)
    self.assertTrue(np.all(allocation.omega_squared >= 0.0))


class RotorAerodynamicsTest(tu.QuadwindTestCase):

  def testHoverInducedVelocity(self):
    solution = quadsim.induced_velocity([0.0, 0.0, 0.0], 4.0)
    self.assertAlmostEqual(solution.velocity, 4.0, places=10)
    self.assertEqual(quadsim.corrected_thrust(3.0, [0.0, 0.0, 0.0], 4.0), 3.0)
    self.assertEqual(quadsim.corrected_thrust(0.0, [5.0, 1.0, 2.0], 4.0), 0.0)

  def testInducedVelocityMatchesBracketingOracle(self):
    solution = quadsim.induced_velocity([2.0, 0.0, 0.0], 4.0)
    oracle = optimize.bisect(lambda x: x * np.sqrt(4.0 + x * x) - 16.0,
                             0.0, 10.0, xtol=1e-14)
    self.assertEqual(solution.method, 'fixed_point')
    self.assertAlmostEqual(solution.velocity, oracle, delta=1e-8)
    self.assertAlmostEqual(
        quadsim.corrected_thrust(4.0, [2.0, 0.0, 0.0], 4.0), 4.0, places=10)

  def testFallbackWhenIterationIsCut(self):
    solution = quadsim.induced_velocity([3.0, 1.0, -2.0], 5.0,
                                        max_iterations=1)
    self.assertEqual(solution.method, 'bisection')
    self.assertFalse(solution.converged)
    v_i = solution.velocity
    self.assertAlmostEqual(v_i * np.sqrt(10.0 + (v_i - 2.0) ** 2), 25.0,
                           places=7)

  def testCorrectionRatio(self):
    self.assertAlmostEqual(quadsim.thrust_correction_ratio(4.0, 1.0), 0.8)
    self.assertEqual(quadsim.thrust_correction_ratio(4.0, -3.9), 2.0)

  def testCorrectionIsCappedNearVortexRing(self):
    cap = quadsim.THRUST_CORRECTION_CAP
    self.assertEqual(cap, 2.0)
    # The cap takes over where v_i + w falls to v_i / cap, and meets the
    # uncapped ratio there.
    self.assertEqual(quadsim.thrust_correction_ratio(4.0, -2.0), cap)
    self.assertAlmostEqual(quadsim.thrust_correction_ratio(4.0, -1.999),
                           4.0 / 2.001)
    for w in (-2.5, -4.0, -10.0):
      self.assertEqual(quadsim.thrust_correction_ratio(4.0, w), cap)
    self.assertEqual(quadsim.thrust_correction_ratio(4.0, -3.0, cap=3.0), 3.0)

    # Sinking with u = 4, w = -2 and v_h = 2: v_i ~ 0.97, so v_i + w < 0.
    v_i = quadsim.induced_velocity([4.0, 0.0, -2.0], 2.0).velocity
    self.assertLess(v_i - 2.0, v_i / cap)
    self.assertEqual(quadsim.corrected_thrust(3.0, [4.0, 0.0, -2.0], 2.0),
                     3.0 * cap)

  def testBladeFlapping(self):
    self.assertVectorsClose(quadsim.blade_flapping(2.0, 0.0, 0.0, 0.003),
                            [0.0, 0.0, 2.0])
    self.assertVectorsClose(quadsim.blade_flapping(2.0, 10.0, 0.0, 0.003),
                            2.0 * np.array([np.sin(0.03), 0.0, np.cos(0.03)]))

  def testBladeFlappingSymmetryAndMagnitude(self):
    gamma = 0.7
    rotation = np.array([[np.cos(gamma), -np.sin(gamma)],
                         [np.sin(gamma), np.cos(gamma)]])
    random_state = np.random.RandomState(2)
    for _ in six.moves.range(20):
      u, v = random_state.normal(scale=8.0, size=2)
      thrust = random_state.uniform(0.0, 20.0)
      base = quadsim.blade_flapping(thrust, u, v, 0.003)
      turned_u, turned_v = rotation.dot([u, v])
      turned = quadsim.blade_flapping(thrust, turned_u, turned_v, 0.003)
      self.assertVectorsClose(turned[:2], rotation.dot(base[:2]), atol=1e-12)
      self.assertAlmostEqual(np.linalg.norm(base), thrust, places=10)

  def testRotorForcesAtHover(self):
    params = quadsim.QuadParams()
    rate = quadsim.hover_rotor_rate(params)
    forces = quadsim.rotor_forces([rate] * 4, quadsim.QuadState.at_rest(),
                                  np.zeros(3), params)
    self.assertAlmostEqual(forces.correction, 1.0, places=9)
    self.assertVectorsClose(forces.thrust_vector, [0.0, 0.0, params.weight])


if __name__ == '__main__':
  unittest.main()
