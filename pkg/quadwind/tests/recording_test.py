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

"""Tests of provenance lines, CSV files, trajectory logs and containers."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import hashlib
import io
import struct
import unittest

import numpy as np

import quadwind
from quadwind import recording
from quadwind.tests import test_utils as tu

import six


class ProvenanceTest(tu.QuadwindTestCase):

  def testFieldOrder(self):
    line = recording.provenance_line('abc', 3, zeta='x', beta=2)
    self.assertEqual(line, '# quadwind {} config=abc seed=3 beta=2 zeta=x'
                     .format(quadwind.__version__))

  def testNoneValues(self):
    line = recording.provenance_line()
    self.assertTrue(line.endswith('config=none seed=none'))

  def testParse(self):
    fields = recording.parse_provenance(
        recording.provenance_line('abc', 3, kind='signal'))
    self.assertEqual(list(fields), ['version', 'config', 'seed', 'kind'])
    self.assertEqual(fields['seed'], '3')
    self.assertEqual(recording.parse_provenance('# some other tool 1.0'),
                     collections.OrderedDict())
    self.assertEqual(recording.parse_provenance('t,x'),
                     collections.OrderedDict())


class CsvTest(tu.QuadwindTestCase):

  def setUp(self):
    self.path = self.tempPath('table.csv')

  def _writeText(self, text):
    with io.open(self.path, 'w', encoding='utf-8') as f:
      f.write(text)

  def testRoundTrip(self):
    rows = np.array([[0.1, 1.0 / 3.0], [2.5e-17, -7.0]])
    recording.write_csv(self.path, ('a', 'b'), rows,
                        recording.provenance_line('abc', 1))
    table = recording.read_csv(self.path)
    self.assertEqual(table.columns, ['a', 'b'])
    self.assertEqual(table.provenance['config'], 'abc')
    self.assertVectorsClose(table.rows, rows, rtol=0)
    self.assertProvenance(self.path, config='abc', seed='1')

  def testFormats(self):
    recording.write_csv(self.path, ('method', 'value'),
                        np.array([['nn', 0.5]], dtype=object),
                        recording.provenance_line(), formats=['%s', '%.3f'])
    self.assertEqual(self.readText(self.path).splitlines()[1:],
                     ['method,value', 'nn,0.500'])
    table = recording.read_csv(self.path, numeric=False)
    self.assertEqual(table.rows, [['nn', '0.500']])

  def testEmptyRows(self):
    recording.write_csv(self.path, ('a', 'b'), [], recording.provenance_line())
    self.assertEqual(recording.read_csv(self.path).rows.shape, (0, 2))

  def testPlainCsvWithoutProvenance(self):
    self._writeText(u'a,b\n1,2\n\n3,4\n')
    table = recording.read_csv(self.path)
    self.assertEqual(len(table.provenance), 0)
    self.assertVectorsClose(table.rows, [[1.0, 2.0], [3.0, 4.0]])

  def testMalformedFiles(self):
    self._writeText(u'# quadwind 1.0 config=none seed=none\n')
    with self.assertRaises(recording.FormatError):
      recording.read_csv(self.path)
    self._writeText(u'a,b\n1,2,3\n')
    with six.assertRaisesRegex(self, recording.FormatError, 'line 2'):
      recording.read_csv(self.path)
    self._writeText(u'a,b\n1,x\n')
    with self.assertRaises(recording.FormatError):
      recording.read_csv(self.path)

  def testWrongRowWidth(self):
    with self.assertRaises(ValueError):
      recording.write_csv(self.path, ('a', 'b'), [[1.0, 2.0, 3.0]],
                          recording.provenance_line())

  def testRequireColumns(self):
    recording.write_csv(self.path, ('a', 'b'), [[1.0, 2.0]],
                        recording.provenance_line())
    table = recording.read_csv(self.path)
    recording.require_columns(table, ('a', 'b'), self.path)
    with six.assertRaisesRegex(self, recording.FormatError, 'expected a,c'):
      recording.require_columns(table, ('a', 'c'), self.path)


class TrajectoryLogTest(tu.QuadwindTestCase):

  def testRoundTripKeepsMetadata(self):
    log = tu.make_log(50, seed=3, trajectory='line')
    path = self.tempPath('log.csv')
    recording.write_trajectory_log(log, path)
    self.assertProvenance(path, config='feedfacefeedface', seed='3',
                          trajectory='line')
    loaded = recording.read_trajectory_log(path)
    self.assertVectorsClose(loaded.as_array(), log.as_array(), rtol=0)
    self.assertEqual(loaded.metadata['seed'], 3)
    self.assertEqual(loaded.metadata['config_hash'], 'feedfacefeedface')
    self.assertEqual(loaded.metadata['trajectory'], 'line')
    self.assertNotIn('version', loaded.metadata)

  def testNonScalarMetadataStaysOutOfTheProvenance(self):
    log = tu.make_log(5)
    log.metadata['wind_description'] = {'kind': 'DrydenWind'}
    self.assertNotIn('wind_description', recording.log_provenance(log))

  def testWrongColumns(self):
    path = self.tempPath('log.csv')
    recording.write_csv(path, ('t', 'x'), [[0.0, 1.0]],
                        recording.provenance_line())
    with self.assertRaises(recording.FormatError):
      recording.read_trajectory_log(path)

  def testValidation(self):
    with self.assertRaises(ValueError):
      recording.TrajectoryLog([0.0, 1.0], np.zeros((2, 3)), np.zeros((2, 3)),
                              np.zeros((3, 3)))
    with self.assertRaises(ValueError):
      recording.TrajectoryLog([0.0, 0.0], np.zeros((2, 3)), np.zeros((2, 3)),
                              np.zeros((2, 3)))

  def testSamplePeriodAndRegularity(self):
    log = tu.make_log(20, period=0.1)
    self.assertAlmostEqual(log.sample_period, 0.1, places=12)
    log.check_regular()
    log.check_regular(0.1)
    with self.assertRaises(ValueError):
      log.check_regular(0.2)
    array = log.as_array()
    array[10:, 0] += 0.05
    with six.assertRaisesRegex(self, ValueError, 'step 9 to 10'):
      recording.TrajectoryLog.from_array(array).check_regular()
    with self.assertRaises(ValueError):
      tu.make_log(1).sample_period  # pylint: disable=expression-not-assigned

  def testSlice(self):
    log = tu.make_log(20)
    part = log.slice(5, 8)
    self.assertEqual(len(part), 3)
    self.assertVectorsClose(part.times, log.times[5:8])
    self.assertEqual(part.metadata, log.metadata)


class ContainerTest(tu.QuadwindTestCase):

  MAGIC = b'QWTESTCT'

  def setUp(self):
    self.path = self.tempPath('thing.bin')
    self.arrays = [('weights', np.arange(6.0).reshape(2, 3)),
                   ('scalar', np.array(2.5))]
    recording.write_container(self.path, self.MAGIC, {'answer': 42},
                              self.arrays)
    with open(self.path, 'rb') as f:
      self.data = f.read()

  def _write(self, data):
    with open(self.path, 'wb') as f:
      f.write(data)

  def testRoundTrip(self):
    header, arrays = recording.read_container(self.path, self.MAGIC)
    self.assertEqual(header, {'answer': 42})
    self.assertEqual(list(arrays), ['weights', 'scalar'])
    self.assertVectorsClose(arrays['weights'], self.arrays[0][1], rtol=0)
    self.assertEqual(arrays['scalar'].shape, ())

  def testWrongMagic(self):
    with self.assertRaises(recording.FormatError):
      recording.read_container(self.path, b'QWOTHER!')
    with self.assertRaises(ValueError):
      recording.write_container(self.path, b'SHORT', {}, [])

  def testCorruptionFailsTheChecksum(self):
    corrupt = bytearray(self.data)
    corrupt[-40] ^= 0x01
    self._write(bytes(corrupt))
    with self.assertRaises(recording.ChecksumError):
      recording.read_container(self.path, self.MAGIC)

  def testTruncationFailsTheChecksum(self):
    self._write(self.data[:-10])
    with self.assertRaises(recording.ChecksumError):
      recording.read_container(self.path, self.MAGIC)
    self._write(self.data[:12])
    with self.assertRaises(recording.ChecksumError):
      recording.read_container(self.path, self.MAGIC)

  def testOtherVersion(self):
    payload = self.data[:-32]
    payload = payload[:8] + struct.pack('<I', 99) + payload[12:]
    self._write(payload + hashlib.sha256(payload).digest())
    with self.assertRaises(recording.VersionError):
      recording.read_container(self.path, self.MAGIC)


if __name__ == '__main__':
  unittest.main()
