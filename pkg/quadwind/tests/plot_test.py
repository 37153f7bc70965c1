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

"""Tests of the Plot blackboard and the logging protocol."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import unittest

from quadwind import plot
from quadwind.protocols import logging as qw_logging
from quadwind.tests import test_utils as tu


class LoggingTest(tu.QuadwindTestCase):

  def testConsumeDrains(self):
    the_plot = plot.Plot()
    self.assertEqual(qw_logging.consume(the_plot), [])
    the_plot.log('one')
    qw_logging.log(the_plot, 'two')
    self.assertEqual(qw_logging.consume(the_plot), ['one', 'two'])
    self.assertEqual(qw_logging.consume(the_plot), [])

  def testRelayKeepsOrder(self):
    source, destination = plot.Plot(), plot.Plot()
    destination.log('earlier')
    source.log('a')
    source.log('b')
    self.assertEqual(qw_logging.relay(source, destination), 2)
    self.assertEqual(qw_logging.consume(source), [])
    self.assertEqual(qw_logging.consume(destination), ['earlier', 'a', 'b'])


class PlotTest(tu.QuadwindTestCase):

  def testCounters(self):
    the_plot = plot.Plot()
    self.assertEqual(the_plot.counts, {})
    self.assertEqual(the_plot.count('saturated_steps'), 1)
    self.assertEqual(the_plot.count('saturated_steps', 4), 5)
    counts = the_plot.counts
    counts['saturated_steps'] = 0
    self.assertEqual(the_plot.counts['saturated_steps'], 5)

  def testClockStartsBeforeTheFirstStep(self):
    the_plot = plot.Plot()
    self.assertEqual(the_plot.frame, -1)
    self.assertEqual(the_plot.time, 0.0)
    the_plot._advance_clock(0.25)  # pylint: disable=protected-access
    self.assertEqual(the_plot.frame, 0)
    self.assertEqual(the_plot.time, 0.25)

  def testIsADict(self):
    the_plot = plot.Plot()
    the_plot['seed'] = 3
    self.assertEqual(the_plot.get('seed'), 3)


if __name__ == '__main__':
  unittest.main()
