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

"""Tests of the wind signal generators."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import unittest

import numpy as np
from scipy import signal

from quadwind import wind
from quadwind.tests import test_utils as tu

import six


class PiecewiseConstantTest(tu.QuadwindTestCase):

  def testDefaultsStayInRange(self):
    schedule = wind.piecewise_constant_wind(3, duration=600.0)
    self.assertTrue(np.all(np.abs(schedule.values[:, :2]) <= 7.0))
    self.assertTrue(np.all(schedule.values[:, 2] == 0.0))
    self.assertEqual(schedule.start_times[0], 0.0)
    lengths = np.diff(schedule.start_times)
    self.assertTrue(np.all((lengths > 0.0) & (lengths <= 15.0)))
    self.assertGreaterEqual(schedule.start_times[-1] + 15.0, 600.0)

  def testCollapsedRangeIsConstant(self):
    schedule = wind.piecewise_constant_wind(0, amplitude_range=(2.5, 2.5),
                                            duration=100.0)
    values = schedule.value_at(np.linspace(0.0, 100.0, 57))
    self.assertTrue(np.all(values[:, :2] == 2.5))

  def testSameSeedSameSignal(self):
    first = wind.piecewise_constant_wind(11, duration=300.0)
    second = wind.piecewise_constant_wind(11, duration=300.0)
    self.assertVectorsClose(first.start_times, second.start_times, rtol=0)
    self.assertVectorsClose(first.values, second.values, rtol=0)

  def testValueAtHoldsBetweenJumps(self):
    schedule = wind.PiecewiseConstantSignal(
        np.array([0.0, 5.0]), np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]),
        10.0)
    self.assertEqual(schedule.value_at(4.999)[0], 1.0)
    self.assertEqual(schedule.value_at(5.0)[0], 2.0)
    self.assertEqual(schedule.value_at(50.0)[0], 2.0)
    self.assertVectorsClose(schedule.jump_times, [5.0])

  def testBadRanges(self):
    with self.assertRaises(ValueError):
      wind.piecewise_constant_wind(0, amplitude_range=(1.0, -1.0))
    with self.assertRaises(ValueError):
      wind.piecewise_constant_wind(0, interval_range=(0.0, 0.0))
    with self.assertRaises(ValueError):
      wind.piecewise_constant_wind(0, duration=0.0)


class DrydenTest(tu.QuadwindTestCase):

  def testZeroSigmaGivesNoTurbulence(self):
    params = wind.DrydenParams(sigma=(0.0, 0.0, 0.0))
    dryden_filter = wind.DrydenFilter(params, 0.01)
    output = wind.dryden_series(dryden_filter, np.random.RandomState(0), 500)
    self.assertTrue(np.all(output == 0.0))

  def testLongitudinalDcGain(self):
    params = wind.DrydenParams(sigma=(1.06, 1.06, 0.7))
    numerator, denominator = wind.dryden_transfer_functions(params)[0]
    dc_gain = numerator[-1] / denominator[-1]
    self.assertAlmostEqual(dc_gain, 1.06 * np.sqrt(2.0 * 200.0 / 5.0),
                           places=12)

  def testStepAndSeriesAgree(self):
    params = wind.DrydenParams()
    stepped_filter = wind.DrydenFilter(params, 0.01)
    series_filter = wind.DrydenFilter(params, 0.01)
    stepped_noise = np.random.RandomState(5)
    stepped = np.array([
        wind.dryden_step(stepped_filter, 0.01, stepped_noise.randn(3))
        for _ in six.moves.range(300)])
    series = wind.dryden_series(series_filter, np.random.RandomState(5), 300)
    self.assertVectorsClose(stepped, series, rtol=1e-12, atol=1e-14)

  def testStepRejectsMismatchedDt(self):
    dryden_filter = wind.DrydenFilter(wind.DrydenParams(), 0.01)
    with self.assertRaises(ValueError):
      wind.dryden_step(dryden_filter, 0.02, np.zeros(3))
    with self.assertRaises(ValueError):
      wind.dryden_step(dryden_filter, 0.0, np.zeros(3))

  def testParamsValidation(self):
    with self.assertRaises(ValueError):
      wind.DrydenParams(airspeed=0.0)
    with self.assertRaises(ValueError):
      wind.DrydenParams(sigma=(-1.0, 1.0, 1.0))
    with self.assertRaises(ValueError):
      wind.DrydenParams(length_scale=(200.0, 0.0, 200.0))

  def testLongRunVariances(self):
    for sigma in ((0.53, 0.53, 0.35), (1.06, 1.06, 0.7)):
      params = wind.DrydenParams(sigma=sigma)
      # A coarse update step keeps a million samples many correlation times
      # (L / V = 40 s) long.
      dryden_filter = wind.DrydenFilter(params, 0.1)
      output = wind.dryden_series(dryden_filter, np.random.RandomState(0),
                                  10 ** 6)
      variances = np.var(output, axis=0)
      self.assertVectorsClose(variances, np.square(sigma), rtol=0.1,
                              err_msg='sigma={}'.format(sigma))

  def testFilterSpectraMatchTheParametricForms(self):
    params = wind.DrydenParams(sigma=(1.06, 1.06, 0.7))
    wavenumbers = np.logspace(-5, -1, 40)
    speed = params.airspeed
    shapes = (wind.SpectralParams.longitudinal(1.06, 200.0),
              wind.SpectralParams.transverse(1.06, 200.0),
              wind.SpectralParams.transverse(0.7, 200.0))
    for axis, (numerator, denominator) in enumerate(
        wind.dryden_transfer_functions(params)):
      _, response = signal.freqs(numerator, denominator,
                                 worN=wavenumbers * speed)
      filter_spectrum = np.abs(response) ** 2 * speed / np.pi
      self.assertVectorsClose(
          filter_spectrum, wind.dryden_spectrum(shapes[axis], wavenumbers),
          rtol=1e-9, err_msg='axis {}'.format(axis))


class SpectrumTest(tu.QuadwindTestCase):

  def testClosedForms(self):
    params = wind.SpectralParams(sigma=2.0, length_scale=100.0)
    self.assertAlmostEqual(wind.dryden_spectrum(params, 0.0),
                           4.0 * 200.0 / np.pi, places=10)
    self.assertAlmostEqual(wind.dryden_spectrum(params, 0.01),
                           4.0 * 200.0 / np.pi / 2.0, places=10)
    silent = wind.SpectralParams(sigma=0.0)
    self.assertTrue(np.all(
        wind.dryden_spectrum(silent, np.linspace(0, 1, 9)) == 0.0))
    with self.assertRaises(ValueError):
      wind.dryden_spectrum(params, -1.0)

  def testParamsValidation(self):
    with self.assertRaises(ValueError):
      wind.SpectralParams(bins=0)
    with self.assertRaises(ValueError):
      wind.SpectralParams(b=0.0)
    with self.assertRaises(ValueError):
      wind.SpectralParams(wavenumber_range=(1.0, 0.5))


class SpectralSynthesisTest(tu.QuadwindTestCase):

  def setUp(self):
    self.params = wind.SpectralParams(sigma=1.06, length_scale=200.0, bins=50,
                                      mean=3.0)
    # Bin centres are odd multiples of half a bin, so the signal repeats every
    # 4 pi / dOmega metres.
    self.period = 4.0 * np.pi / self.params.bin_width

  def testSingleBinIsASinusoid(self):
    params = wind.SpectralParams(sigma=1.0, length_scale=50.0, bins=1)
    components = wind.spectral_components(params, np.random.RandomState(8))
    amplitude = np.sqrt(params.bin_width * wind.dryden_spectrum(
        params, params.wavenumbers[0]))
    self.assertAlmostEqual(components.amplitudes[0], amplitude, places=12)
    positions = np.linspace(0.0, 500.0, 101)
    self.assertVectorsClose(
        wind.synth_spectral_signal(params, 8, positions=positions),
        amplitude * np.sin(params.wavenumbers[0] * positions +
                           components.phases[0]), atol=1e-12)

  def testMeanAndVarianceOverOnePeriod(self):
    components = wind.spectral_components(self.params,
                                          np.random.RandomState(1))
    positions = np.arange(20000) * self.period / 20000
    values = components.spatial(positions)
    self.assertAlmostEqual(np.mean(values), 3.0, delta=1e-9)
    self.assertAlmostEqual(np.var(values), components.variance, delta=1e-9)

  def testTemporalIsSpatialAtTheMeanAirspeed(self):
    times = np.linspace(0.0, 100.0, 333)
    temporal = wind.synth_spectral_signal(self.params, 4, times=times)
    spatial = wind.synth_spectral_signal(
        self.params, 4, positions=times * self.params.airspeed)
    self.assertVectorsClose(temporal, spatial, rtol=0, atol=1e-10)

  def testZeroSigmaIsTheMean(self):
    params = self.params._replace(sigma=0.0)
    values = wind.synth_spectral_signal(params, 0, times=np.arange(10.0))
    self.assertTrue(np.all(values == 3.0))

  def testNeedsExactlyOneAxis(self):
    with self.assertRaises(ValueError):
      wind.synth_spectral_signal(self.params, 0)
    with self.assertRaises(ValueError):
      wind.synth_spectral_signal(self.params, 0, positions=[0.0], times=[0.0])


if __name__ == '__main__':
  unittest.main()
