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

"""Tests of gridded wind files and their sampling."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import struct
import unittest

import numpy as np

from quadwind import grid
from quadwind import recording
from quadwind.tests import test_utils as tu

import six


def _linear(x, y, z, t):
  return (0.5 * x + t, -0.25 * y, 0.1 * z - t)


class GridSamplingTest(tu.QuadwindTestCase):

  def setUp(self):
    self.field = grid.grid_from_function(_linear, (5, 4, 3, 3),
                                         (2.0, 4.0, 5.0, 1.0))

  def testNodesAreExact(self):
    for x, y, z, t in ((0.0, 0.0, 0.0, 0.0), (8.0, 12.0, 10.0, 2.0),
                       (4.0, 4.0, 5.0, 1.0)):
      self.assertVectorsClose(grid.sample_grid(self.field, (x, y, -z), t),
                              _linear(x, y, z, t), atol=1e-12)

  def testLinearInsideACell(self):
    # The field is linear, so quad-linear sampling reproduces it.
    point = (3.3, 5.1, 7.2, 1.4)
    x, y, z, t = point
    self.assertVectorsClose(grid.sample_grid(self.field, (x, y, -z), t),
                            _linear(*point), atol=1e-12)

  def testHorizontalAxesArePeriodic(self):
    # Periods are 5 * 2 m and 4 * 4 m.
    here = grid.sample_grid(self.field, (3.0, 5.0, -5.0), 1.0)
    self.assertVectorsClose(
        grid.sample_grid(self.field, (13.0, 5.0 - 16.0, -5.0), 1.0), here,
        atol=1e-12)
    # Between the last node and the wrapped first one.
    wrapped = grid.sample_grid(self.field, (9.0, 0.0, 0.0), 0.0)
    self.assertAlmostEqual(wrapped[0], 0.5 * (4.0 + 0.0), places=12)

  def testHeightAndTimeClamp(self):
    top = grid.sample_grid(self.field, (2.0, 4.0, -10.0), 2.0)
    self.assertVectorsClose(grid.sample_grid(self.field, (2.0, 4.0, -50.0),
                                             9.0), top, atol=1e-12)
    ground = grid.sample_grid(self.field, (2.0, 4.0, 0.0), 0.0)
    self.assertVectorsClose(grid.sample_grid(self.field, (2.0, 4.0, 3.0),
                                             -4.0), ground, atol=1e-12)

  def testManyMatchesOne(self):
    random_state = np.random.RandomState(0)
    positions = random_state.uniform(-20.0, 20.0, size=(25, 3))
    times = random_state.uniform(-1.0, 3.0, size=25)
    many = grid.sample_grid_many(self.field, positions, times)
    for index in six.moves.range(25):
      self.assertVectorsClose(
          many[index], grid.sample_grid(self.field, positions[index],
                                        times[index]), rtol=1e-12, atol=1e-12)

  def testSingleNodeAxes(self):
    field = grid.grid_from_function(lambda x, y, z, t: (1.0, 2.0, 3.0),
                                    (1, 1, 1, 1), (1.0, 1.0, 1.0, 1.0))
    self.assertVectorsClose(grid.sample_grid(field, (5.0, -7.0, -3.0), 100.0),
                            [1.0, 2.0, 3.0])

  def testFieldValidation(self):
    with self.assertRaises(ValueError):
      grid.GridWindField((2, 2, 2, 2), (1.0, 1.0, 0.0, 1.0), (0.0,) * 4,
                         np.zeros((2, 2, 2, 2, 3)))
    with self.assertRaises(ValueError):
      grid.GridWindField((2, 2, 2, 2), (1.0,) * 4, (0.0,) * 4,
                         np.zeros((2, 2, 2, 3)))


class GridFileTest(tu.QuadwindTestCase):

  def setUp(self):
    # Quarter-integer values survive the float32 file encoding exactly.
    self.field = grid.grid_from_function(
        lambda x, y, z, t: (0.25 * x, 0.5 * y + t, -0.75 * z),
        (3, 2, 2, 2), (1.0, 2.0, 3.0, 0.5), origin=(10.0, 0.0, 1.0, 0.0))
    self.path = self.tempPath('wind.qwgrid')
    grid.save_grid_wind(self.field, self.path)
    with open(self.path, 'rb') as f:
      self.data = f.read()

  def _write(self, data):
    with open(self.path, 'wb') as f:
      f.write(data)

  def _assertOffset(self, offset):
    with self.assertRaises(grid.GridFormatError) as context:
      grid.load_grid_wind(self.path)
    self.assertEqual(context.exception.offset, offset)
    self.assertIn('offset {}'.format(offset), str(context.exception))

  def testRoundTrip(self):
    self.assertEqual(len(self.data), 92 + 3 * 2 * 2 * 2 * 3 * 4)
    loaded = grid.load_grid_wind(self.path)
    self.assertEqual(loaded.dims, self.field.dims)
    self.assertEqual(loaded.spacings, self.field.spacings)
    self.assertEqual(loaded.origin, self.field.origin)
    self.assertVectorsClose(loaded.velocity, self.field.velocity, rtol=0)

  def testBadMagic(self):
    self._write(b'NOTAGRID' + self.data[8:])
    self._assertOffset(0)

  def testBadVersion(self):
    self._write(self.data[:8] + struct.pack('<I', 7) + self.data[12:])
    self._assertOffset(8)

  def testTruncatedHeader(self):
    self._write(self.data[:50])
    self._assertOffset(50)

  def testNonPositiveSpacing(self):
    self._write(self.data[:44] + struct.pack('<d', 0.0) + self.data[52:])
    # dz is the third spacing.
    self._assertOffset(44)

  def testTruncatedVelocities(self):
    self._write(self.data[:-4])
    self._assertOffset(len(self.data) - 4)

  def testTrailingBytes(self):
    self._write(self.data + b'\0\0\0\0')
    self._assertOffset(len(self.data))


class GridBuildersTest(tu.QuadwindTestCase):

  def testFromCsvInAnyRowOrder(self):
    expected = grid.grid_from_function(_linear, (3, 2, 2, 2),
                                       (2.0, 4.0, 5.0, 1.0))
    rows = []
    for it in six.moves.range(2):
      for iz in six.moves.range(2):
        for iy in six.moves.range(2):
          for ix in six.moves.range(3):
            x, y, z, t = 2.0 * ix, 4.0 * iy, 5.0 * iz, 1.0 * it
            rows.append([t, x, y, z] + list(_linear(x, y, z, t)))
    rows = np.array(rows)[np.random.RandomState(0).permutation(len(rows))]
    path = self.tempPath('grid.csv')
    recording.write_csv(path, grid.CSV_COLUMNS, rows,
                        recording.provenance_line())
    field = grid.grid_from_csv(path)
    self.assertEqual(field.dims, (3, 2, 2, 2))
    self.assertEqual(field.spacings, (2.0, 4.0, 5.0, 1.0))
    self.assertVectorsClose(field.velocity, expected.velocity, atol=1e-12)

  def testFromCsvIncompleteGrid(self):
    path = self.tempPath('grid.csv')
    recording.write_csv(path, grid.CSV_COLUMNS,
                        [[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
                         [0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0],
                         [1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0]],
                        recording.provenance_line())
    with self.assertRaises(ValueError):
      grid.grid_from_csv(path)

  def testFromFieldVisitsNodesInTimeOrder(self):
    field = tu.RecordingWind((1.0, 2.0, 3.0))
    tabulated = grid.grid_from_field(field, (2, 2, 2, 3),
                                     (1.0, 1.0, 2.0, 0.5))
    times = [t for _, t in field.samples]
    self.assertEqual(len(times), 24)
    self.assertEqual(times, sorted(times))
    # Heights map to negative down coordinates.
    self.assertEqual(sorted(set(p[2] for p, _ in field.samples)), [-2.0, 0.0])
    self.assertTrue(np.all(tabulated.velocity == [1.0, 2.0, 3.0]))

  def testDescribe(self):
    field = grid.grid_from_function(_linear, (2, 2, 2, 2),
                                    (1.0, 1.0, 1.0, 1.0))
    self.assertEqual(grid.describe_grid(field)['dims'], [2, 2, 2, 2])


if __name__ == '__main__':
  unittest.main()
