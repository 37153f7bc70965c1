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

"""Tests of the named experiments and their building blocks."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
import unittest

import numpy as np

from quadwind import cases
from quadwind import config as config_lib
from quadwind import estimate
from quadwind import plot
from quadwind import recording
from quadwind.tests import test_utils as tu


def _series(method, seed, warmup=0):
  random_state = np.random.RandomState(seed)
  times = np.arange(100) * 0.1
  true = np.column_stack([np.sin(times), 1.0 + np.cos(0.3 * times)])
  estimates = true + random_state.normal(scale=0.2, size=true.shape)
  flags = np.zeros(100, dtype=bool)
  flags[:warmup] = True
  estimates[:warmup] = np.nan
  return estimate.EstimateSeries(times, true, estimates, flags, method)


class CaseConfigTest(tu.QuadwindTestCase):

  def testKnownCases(self):
    self.assertEqual(list(cases.CASES), ['hover-dryden-1.06',
                                         'line-dryden-1.06', 'hover-piecewise'])
    self.assertEqual(cases.CASES['hover-piecewise'].test_duration, 600.0)

  def testOverridesAndDurations(self):
    config = cases.case_config('line-dryden-1.06')
    self.assertEqual(config['trajectory']['kind'], 'line')
    self.assertEqual(config['wind']['dryden']['sigma'], [1.06, 1.06, 0.7])
    self.assertEqual(config['simulation']['duration'], 4800.0)
    self.assertEqual(config['evaluation']['duration'], 5000.0)

  def testSeedAndEpochs(self):
    config = cases.case_config('hover-piecewise', epochs=3, seed=20)
    self.assertEqual(config['training']['epochs'], 3)
    self.assertEqual(config['simulation']['seed'], 20)
    self.assertEqual(config['evaluation']['seed'], 21)
    self.assertEqual(config['training']['seed'], 20)
    self.assertEqual(config['wind']['mean'], [0.0, 0.0, 0.0])

  def testBaseIsKept(self):
    base = config_lib.load_config(overrides={'gains': {'roll_limit': 0.5}})
    config = cases.case_config('hover-dryden-1.06', base=base)
    self.assertEqual(config['gains']['roll_limit'], 0.5)
    self.assertEqual(base['wind']['mean'], [1.0, 2.0, 0.0])

  def testUnknownCase(self):
    with self.assertRaises(KeyError):
      cases.case_config('gale')
    with self.assertRaises(KeyError):
      cases.run_case('gale', self.tempPath('out'))
    with self.assertRaises(ValueError):
      cases.run_case('hover-piecewise', self.tempPath('out'), scale=0.0)


class StageTest(tu.QuadwindTestCase):

  def testFlyStampsTheLog(self):
    config = config_lib.load_config(overrides={'wind': {'kind': 'constant'}})
    log = cases.fly(config, 1.0, 4)
    self.assertEqual(len(log), 11)
    self.assertEqual(log.metadata['trajectory'], 'hover')
    self.assertEqual(log.metadata['config_hash'],
                     config_lib.config_hash(config))
    self.assertEqual(log.metadata['seed'], 4)
    self.assertVectorsClose(log.winds[:, :2], [[1.0, 2.0]] * 11)

  def testDatasetFollowsTheTrainingSection(self):
    config = config_lib.load_config(
        overrides={'training': {'sequence_length': 8, 'stride': 4}})
    dataset = cases.make_dataset(tu.make_log(100), config)
    self.assertEqual(dataset.sequence_length, 8)
    self.assertEqual(dataset.size, len(estimate.window_starts(100, 8, 4)))

  def testWriteEvaluation(self):
    the_plot = plot.Plot()
    out_dir = os.path.dirname(self.tempPath('report.txt'))
    series_list = [_series('nn', 0, warmup=9), _series('wt', 1)]
    provenance = recording.provenance_line('abc', 1)
    reports, paths = cases.write_evaluation(series_list, out_dir, provenance,
                                            0.2, the_plot, prefix='test_')
    self.assertEqual([r.sample_count for r in reports], [91, 91])
    self.assertEqual(list(paths), ['report', 'report_values', 'hist_nn_north',
                                   'hist_nn_east', 'hist_wt_north',
                                   'hist_wt_east'])
    self.assertEqual(os.path.basename(paths['hist_wt_east']),
                     'test_hist_wt_east.csv')
    for path in paths.values():
      self.assertProvenance(path, config='abc', seed='1')
    table = recording.read_csv(paths['hist_nn_north'])
    self.assertEqual(table.rows[:, 2].sum(), 91)


if __name__ == '__main__':
  unittest.main()
