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

"""Trajectory logs and the files quadwind reads and writes.

Two kinds of files come out of quadwind:

* CSV files. The first line is a provenance comment,

      # quadwind 1.0 config=3f2a9c0d1e4b5a67 seed=7 trajectory=hover

  made of `key=value` tokens after the tool name and version. The second
  line is the column header; every further line is one row. Floats are
  written with 17 significant digits, so values round-trip exactly. Files are
  UTF-8 with LF line endings.

* Binary containers, for trained models and built datasets:

      magic            8 bytes, identifies the content
      version          uint32, little-endian
      header length    uint32, little-endian
      header           JSON, UTF-8, sorted keys
      array data       little-endian float64, arrays in header order
      checksum         32-byte SHA-256 of everything before it

  The header lists the arrays as `{"name": ..., "shape": [...]}` entries
  under `"arrays"`, along with whatever metadata the writer adds. Readers
  check the magic, then the checksum, then the version. Containers carry their
  own provenance in the header instead of a comment line.

Re-writing the same content yields byte-identical files.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import hashlib
import io
import json
import struct

import numpy as np

import quadwind

import six


TOOL_NAME = 'quadwind'
CONTAINER_VERSION = 1

_CONTAINER_PREFIX = struct.Struct('<8sII')
_CHECKSUM_BYTES = 32


class FormatError(ValueError):
  """A file is not in the format it claims to be."""


class ChecksumError(FormatError):
  """A container's checksum does not match its contents."""


class VersionError(FormatError):
  """A container was written by an incompatible format version."""


### Provenance ###


def provenance_line(config_hash=None, seed=None, **extra):
  """The provenance comment line for an emitted CSV file (no newline).

  Keys appear as `config`, `seed`, then the `extra` keys in sorted order;
  None values are written as `none`.
  """
  fields = collections.OrderedDict()
  fields['config'] = config_hash
  fields['seed'] = seed
  for key in sorted(extra):
    fields[key] = extra[key]
  tokens = ['{}={}'.format(k, 'none' if v is None else v)
            for k, v in six.iteritems(fields)]
  return '# {} {} {}'.format(TOOL_NAME, quadwind.__version__, ' '.join(tokens))


def parse_provenance(line):
  """Parse a provenance line into an ordered dict of strings.

  Lines that are not quadwind provenance lines give an empty dict. The tool
  version is reported under `'version'`.
  """
  parts = line.strip().split()
  if len(parts) < 3 or parts[0] != '#' or parts[1] != TOOL_NAME:
    return collections.OrderedDict()
  fields = collections.OrderedDict([('version', parts[2])])
  for token in parts[3:]:
    key, _, value = token.partition('=')
    fields[key] = value
  return fields


### CSV files ###


def write_csv(path, columns, rows, provenance, formats=None):
  """Write a provenance-stamped CSV file.

  Args:
    path: destination file.
    columns: column names.
    rows: 2-D array-like, one row per line. Object arrays may mix strings
        with numbers when `formats` says so.
    provenance: the provenance line (see `provenance_line`).
    formats: optional per-column printf formats; default `%.17g` for all.
  """
  rows = np.asarray(rows)
  if rows.ndim == 1:
    rows = rows.reshape(0 if rows.size == 0 else -1, len(columns))
  if rows.ndim != 2 or (rows.size and rows.shape[1] != len(columns)):
    raise ValueError('Expected rows with {} columns; got shape {}.'.format(
        len(columns), rows.shape))
  if formats is None:
    formats = ['%.17g'] * len(columns)
  with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
    f.write(six.text_type(provenance) + u'\n')
    f.write(six.text_type(','.join(columns)) + u'\n')
    template = ','.join(formats)
    for row in rows:
      f.write(six.text_type(template % tuple(row)) + u'\n')


CsvTable = collections.namedtuple('CsvTable', ['provenance', 'columns', 'rows'])


def read_csv(path, numeric=True):
  """Read a CSV file written by `write_csv` (or a plain headed CSV).

  Leading `#` lines are optional; the first of them that parses as a
  provenance line is returned.

  Args:
    path: file to read.
    numeric: if True, rows are parsed as float64; otherwise they are returned
        as lists of strings.

  Returns:
    a `CsvTable` of `(provenance dict, column names, rows)`.

  Raises:
    FormatError: the file has no header or a row of the wrong width.
  """
  provenance = collections.OrderedDict()
  with io.open(path, 'r', encoding='utf-8') as f:
    lines = [line.rstrip('\r\n') for line in f]
  body = 0
  while body < len(lines) and lines[body].startswith('#'):
    if not provenance:
      provenance = parse_provenance(lines[body])
    body += 1
  if body >= len(lines) or not lines[body].strip():
    raise FormatError('{} has no CSV header line.'.format(path))
  columns = [c.strip() for c in lines[body].split(',')]

  rows = []
  for line_number, line in enumerate(lines[body + 1:], start=body + 2):
    if not line.strip():
      continue
    cells = [c.strip() for c in line.split(',')]
    if len(cells) != len(columns):
      raise FormatError('{} line {}: expected {} fields, found {}.'.format(
          path, line_number, len(columns), len(cells)))
    if numeric:
      try:
        cells = [float(c) for c in cells]
      except ValueError:
        raise FormatError('{} line {}: non-numeric field in {!r}.'.format(
            path, line_number, line))
    rows.append(cells)
  if numeric:
    rows = np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))
  return CsvTable(provenance, columns, rows)


def require_columns(table, expected, path):
  if list(table.columns) != list(expected):
    raise FormatError('{} has columns {}; expected {}.'.format(
        path, ','.join(table.columns), ','.join(expected)))


### Trajectory logs ###


class TrajectoryLog(object):
  """Logged flight: time, position, attitude and true wind at a fixed rate.

  A `TrajectoryLog` is the hand-off between simulation and learning. Arrays:

  * `times`: shape `(N,)`, s, strictly increasing.
  * `positions`: `(N, 3)`, NED, m.
  * `attitudes`: `(N, 3)`, Euler angles, rad.
  * `winds`: `(N, 3)`, true wind at the vehicle, NED, m/s.

  `metadata` is a free-form dict (seed, config hash, trajectory kind, wind
  description) that travels into the CSV provenance line.
  """

  COLUMNS = ('t', 'pn', 'pe', 'pd', 'phi', 'theta', 'psi', 'wn', 'we', 'wd')

  def __init__(self, times, positions, attitudes, winds, metadata=None):
    times = np.asarray(times, dtype=np.float64).reshape(-1)
    count = len(times)
    arrays = []
    for name, value in (('positions', positions), ('attitudes', attitudes),
                        ('winds', winds)):
      value = np.asarray(value, dtype=np.float64).reshape(-1, 3) if count else (
          np.zeros((0, 3)))
      if value.shape != (count, 3):
        raise ValueError('{} must have shape ({}, 3); got {}.'.format(
            name, count, value.shape))
      arrays.append(value)
    if count > 1 and np.any(np.diff(times) <= 0):
      raise ValueError('Trajectory log times must be strictly increasing.')
    self._times = times
    self._positions, self._attitudes, self._winds = arrays
    self.metadata = dict(metadata or {})

  @property
  def times(self):
    return self._times

  @property
  def positions(self):
    return self._positions

  @property
  def attitudes(self):
    return self._attitudes

  @property
  def winds(self):
    return self._winds

  def __len__(self):
    return len(self._times)

  @property
  def sample_period(self):
    if len(self) < 2:
      raise ValueError('A log needs two samples to have a sample period.')
    return float(np.median(np.diff(self._times)))

  def check_regular(self, period=None, rtol=1e-6):
    """Raise ValueError unless samples are evenly spaced (by `period`)."""
    if len(self) < 2:
      return
    steps = np.diff(self._times)
    expected = self.sample_period if period is None else period
    if not np.allclose(steps, expected, rtol=rtol, atol=1e-9):
      worst = int(np.argmax(np.abs(steps - expected)))
      raise ValueError(
          'Irregular log timestamps: step {} to {} is {:.9g} s, expected '
          '{:.9g} s.'.format(worst, worst + 1, steps[worst], expected))

  def as_array(self):
    return np.column_stack([self._times, self._positions, self._attitudes,
                            self._winds])

  @classmethod
  def from_array(cls, array, metadata=None):
    array = np.asarray(array, dtype=np.float64).reshape(-1, len(cls.COLUMNS))
    return cls(array[:, 0], array[:, 1:4], array[:, 4:7], array[:, 7:10],
               metadata)

  def slice(self, start, stop=None):
    return TrajectoryLog(self._times[start:stop], self._positions[start:stop],
                         self._attitudes[start:stop], self._winds[start:stop],
                         self.metadata)


def log_provenance(log):
  extra = {k: v for k, v in six.iteritems(log.metadata)
           if k not in ('config_hash', 'seed') and
           isinstance(v, (six.string_types, int, float))}
  return provenance_line(log.metadata.get('config_hash'),
                         log.metadata.get('seed'), **extra)


def write_trajectory_log(log, path):
  write_csv(path, TrajectoryLog.COLUMNS, log.as_array(), log_provenance(log))


def read_trajectory_log(path):
  """Read a trajectory log CSV; provenance fields become metadata."""
  table = read_csv(path)
  require_columns(table, TrajectoryLog.COLUMNS, path)
  metadata = dict(table.provenance)
  metadata.pop('version', None)
  if 'config' in metadata:
    metadata['config_hash'] = metadata.pop('config')
  if metadata.get('seed') not in (None, 'none'):
    try:
      metadata['seed'] = int(metadata['seed'])
    except ValueError:
      pass
  return TrajectoryLog.from_array(table.rows, metadata)


### Binary containers ###


def write_container(path, magic, header, arrays):
  """Write a checksummed binary container.

  Args:
    path: destination file.
    magic: 8-byte magic string.
    header: JSON-serializable dict of metadata. The key `arrays` is reserved.
    arrays: ordered sequence of `(name, array)` pairs; stored as float64.
  """
  if len(magic) != 8:
    raise ValueError('Container magic must be 8 bytes; got {!r}.'.format(magic))
  header = dict(header)
  blobs = []
  descriptors = []
  for name, array in arrays:
    array = np.ascontiguousarray(array, dtype='<f8')
    descriptors.append({'name': name, 'shape': list(array.shape)})
    blobs.append(array.tobytes())
  header['arrays'] = descriptors
  header_bytes = json.dumps(header, sort_keys=True,
                            separators=(',', ':')).encode('utf-8')
  payload = (_CONTAINER_PREFIX.pack(magic, CONTAINER_VERSION,
                                    len(header_bytes)) +
             header_bytes + b''.join(blobs))
  with open(path, 'wb') as f:
    f.write(payload)
    f.write(hashlib.sha256(payload).digest())


def read_container(path, magic):
  """Read a container written by `write_container`.

  Returns:
    a 2-tuple `(header, arrays)`: the header dict (without `arrays`) and an
    `OrderedDict` mapping names to float64 arrays.

  Raises:
    FormatError: wrong magic, or a header that does not match the data.
    ChecksumError: the file is truncated or corrupted.
    VersionError: the format version is not the one this code writes.
  """
  with open(path, 'rb') as f:
    data = f.read()
  if len(data) < len(magic) or data[:len(magic)] != magic:
    raise FormatError('{} does not start with the magic string {!r}.'.format(
        path, magic))
  if len(data) < _CONTAINER_PREFIX.size + _CHECKSUM_BYTES:
    raise ChecksumError('{} is truncated.'.format(path))
  payload, digest = data[:-_CHECKSUM_BYTES], data[-_CHECKSUM_BYTES:]
  if hashlib.sha256(payload).digest() != digest:
    raise ChecksumError('{} failed its checksum; the file is truncated or '
                        'corrupted.'.format(path))
  _, version, header_length = _CONTAINER_PREFIX.unpack_from(payload)
  if version != CONTAINER_VERSION:
    raise VersionError('{} has format version {}; this code reads version '
                       '{}.'.format(path, version, CONTAINER_VERSION))

  offset = _CONTAINER_PREFIX.size
  try:
    header = json.loads(payload[offset:offset + header_length].decode('utf-8'))
  except ValueError as error:
    raise FormatError('{} has an unreadable header: {}'.format(path, error))
  offset += header_length

  arrays = collections.OrderedDict()
  for descriptor in header.pop('arrays', []):
    shape = tuple(descriptor['shape'])
    count = int(np.prod(shape)) if shape else 1
    end = offset + 8 * count
    if end > len(payload):
      raise FormatError('{}: array {!r} runs past the end of the data.'.format(
          path, descriptor['name']))
    arrays[descriptor['name']] = np.frombuffer(
        payload[offset:end], dtype='<f8').astype(np.float64).reshape(shape)
    offset = end
  if offset != len(payload):
    raise FormatError('{} has {} unexplained bytes after its arrays.'.format(
        path, len(payload) - offset))
  return header, arrays
