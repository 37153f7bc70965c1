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

"""Gridded wind fields, e.g. from a large-eddy simulation of the boundary layer.

quadwind does not solve for atmospheric flow; it replays precomputed wind on
a regular space-time grid along the flight path. The vehicle does not
influence the wind.

Axes: `x` points north, `y` east, and `z` is height above the ground (so
`z = -p_d`). Stored velocities are NED components `(w_n, w_e, w_d)`.

File layout (all little-endian):

    offset  size  content
         0     8  magic b'QWINDGRD'
         8     4  uint32 format version (1)
        12    16  uint32 nx, ny, nz, nt
        28    32  float64 dx, dy, dz, dt (m, m, m, s), all > 0
        60    32  float64 origin x0, y0, z0, t0
        92     *  float32 velocities, [t][z][y][x][component], 3 components

Sampling is quad-linear (trilinear in space, linear in time). The horizontal
domain is periodic with periods `nx dx` and `ny dy`; heights and times outside
the grid clamp to the nearest layer or snapshot.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import struct

import numpy as np

from quadwind import recording


MAGIC = b'QWINDGRD'
VERSION = 1

_HEADER = struct.Struct('<8sI4I4d4d')
CSV_COLUMNS = ('t', 'x', 'y', 'z', 'wn', 'we', 'wd')


class GridFormatError(ValueError):
  """A grid wind file is malformed.

  Attributes:
    offset: byte offset in the file where the problem was found.
  """

  def __init__(self, message, offset):
    self.offset = offset
    super(GridFormatError, self).__init__(
        '{} (at byte offset {})'.format(message, offset))


class GridWindField(collections.namedtuple(
    'GridWindField', ['dims', 'spacings', 'origin', 'velocity'])):
  """Wind on a regular `(x, y, z, t)` grid.

  * `dims`: `(nx, ny, nz, nt)`.
  * `spacings`: `(dx, dy, dz, dt)`, all positive.
  * `origin`: `(x0, y0, z0, t0)`.
  * `velocity`: float array of shape `(nt, nz, ny, nx, 3)`.
  """
  __slots__ = ()

  def __new__(cls, dims, spacings, origin, velocity):
    dims = tuple(int(d) for d in dims)
    spacings = tuple(float(s) for s in spacings)
    origin = tuple(float(o) for o in origin)
    if len(dims) != 4 or any(d < 1 for d in dims):
      raise ValueError('Grid dims must be four positive counts; got {}.'.format(
          dims))
    if len(spacings) != 4 or any(not s > 0 for s in spacings):
      raise ValueError('Grid spacings must be four positive numbers; got '
                       '{}.'.format(spacings))
    if len(origin) != 4:
      raise ValueError('Grid origin needs four coordinates; got {}.'.format(
          origin))
    nx, ny, nz, nt = dims
    velocity = np.asarray(velocity, dtype=np.float64)
    if velocity.shape != (nt, nz, ny, nx, 3):
      raise ValueError('Grid velocity must have shape {}; got {}.'.format(
          (nt, nz, ny, nx, 3), velocity.shape))
    return super(GridWindField, cls).__new__(cls, dims, spacings, origin,
                                             velocity)

  @property
  def u(self):
    return self.velocity[..., 0]

  @property
  def v(self):
    return self.velocity[..., 1]

  @property
  def w(self):
    return self.velocity[..., 2]


def save_grid_wind(field, path):
  """Write `field` in the grid wind file format."""
  header = _HEADER.pack(MAGIC, VERSION, *(field.dims + field.spacings +
                                          field.origin))
  with open(path, 'wb') as f:
    f.write(header)
    f.write(np.ascontiguousarray(field.velocity, dtype='<f4').tobytes())


def load_grid_wind(path):
  """Read a grid wind file.

  Raises:
    GridFormatError: the file is truncated, has the wrong magic or version,
        declares invalid dims or spacings, or has trailing bytes.
  """
  with open(path, 'rb') as f:
    data = f.read()
  if data[:len(MAGIC)] != MAGIC:
    raise GridFormatError('Not a quadwind grid file: bad magic string', 0)
  if len(data) < _HEADER.size:
    raise GridFormatError('Header is truncated', len(data))
  values = _HEADER.unpack_from(data)
  version = values[1]
  if version != VERSION:
    raise GridFormatError('Unsupported grid format version {}'.format(version),
                          8)
  dims, spacings, origin = values[2:6], values[6:10], values[10:14]
  if any(d < 1 for d in dims):
    raise GridFormatError('Grid dims must be positive; got {}'.format(dims), 12)
  for index, spacing in enumerate(spacings):
    if not spacing > 0:
      raise GridFormatError('Grid spacing {} must be positive; got {}'.format(
          'xyzt'[index], spacing), 28 + 8 * index)
  if not all(np.isfinite(origin)):
    raise GridFormatError('Grid origin must be finite', 60)

  nx, ny, nz, nt = dims
  expected = nx * ny * nz * nt * 3 * 4
  available = len(data) - _HEADER.size
  if available < expected:
    raise GridFormatError(
        'Velocity data is truncated: {} bytes expected, {} present'.format(
            expected, available), len(data))
  if available > expected:
    raise GridFormatError('{} unexpected trailing bytes'.format(
        available - expected), _HEADER.size + expected)
  velocity = np.frombuffer(data, dtype='<f4', count=expected // 4,
                           offset=_HEADER.size).astype(np.float64)
  return GridWindField(dims, spacings, origin,
                       velocity.reshape(nt, nz, ny, nx, 3))


def _axis_weights(coordinate, origin, spacing, count, periodic):
  """Lower node, upper node and upper weight along one axis."""
  fraction = (coordinate - origin) / spacing
  if periodic:
    lower = np.floor(fraction)
    weight = fraction - lower
    lower = lower.astype(np.int64) % count
    return lower, (lower + 1) % count, weight
  if count == 1:
    zero = np.zeros_like(fraction, dtype=np.int64)
    return zero, zero, np.zeros_like(fraction)
  fraction = np.clip(fraction, 0.0, count - 1.0)
  lower = np.minimum(np.floor(fraction).astype(np.int64), count - 2)
  return lower, lower + 1, fraction - lower


def sample_grid_many(field, positions, times):
  """Sample `field` at many NED `positions` (shape `(N, 3)`) and `times`."""
  positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
  times = np.broadcast_to(np.asarray(times, dtype=np.float64),
                          (positions.shape[0],))
  nx, ny, nz, nt = field.dims
  dx, dy, dz, dt = field.spacings
  x0, y0, z0, t0 = field.origin

  ix = _axis_weights(positions[:, 0], x0, dx, nx, periodic=True)
  iy = _axis_weights(positions[:, 1], y0, dy, ny, periodic=True)
  iz = _axis_weights(-positions[:, 2], z0, dz, nz, periodic=False)
  it = _axis_weights(times, t0, dt, nt, periodic=False)

  result = np.zeros((positions.shape[0], 3))
  for ct in (0, 1):
    wt = it[2] if ct else 1.0 - it[2]
    for cz in (0, 1):
      wz = iz[2] if cz else 1.0 - iz[2]
      for cy in (0, 1):
        wy = iy[2] if cy else 1.0 - iy[2]
        for cx in (0, 1):
          wx = ix[2] if cx else 1.0 - ix[2]
          weight = wt * wz * wy * wx
          corner = field.velocity[it[ct], iz[cz], iy[cy], ix[cx]]
          result += weight[:, np.newaxis] * corner
  return result


def sample_grid(field, position, t):
  """Wind (Vec3, NED, m/s) at NED `position` (m) and time `t` (s)."""
  return sample_grid_many(field, np.reshape(position, (1, 3)), t)[0]


def grid_from_function(function, dims, spacings, origin=(0.0, 0.0, 0.0, 0.0)):
  """Tabulate an analytic wind field on a grid.

  Args:
    function: callable `(x, y, z, t) -> (w_n, w_e, w_d)` accepting broadcast
        numpy arrays, with `z` the height above ground.
    dims: `(nx, ny, nz, nt)`.
    spacings: `(dx, dy, dz, dt)`.
    origin: `(x0, y0, z0, t0)`.

  Returns:
    a `GridWindField`.
  """
  nx, ny, nz, nt = (int(d) for d in dims)
  axes = [o + s * np.arange(n) for o, s, n in zip(
      origin, spacings, (nx, ny, nz, nt))]
  t, z, y, x = np.meshgrid(axes[3], axes[2], axes[1], axes[0], indexing='ij')
  components = function(x, y, z, t)
  velocity = np.stack([np.broadcast_to(c, x.shape) for c in components],
                      axis=-1)
  return GridWindField((nx, ny, nz, nt), spacings, origin, velocity)


def grid_from_field(wind_field, dims, spacings, origin=(0.0, 0.0, 0.0, 0.0)):
  """Tabulate a prepared, reset `wind.WindField` on a grid.

  Nodes are visited in time order, so time-stepped fields such as the Dryden
  wind see non-decreasing sample times. Node `(x, y, z)` is the NED position
  `(x, y, -z)`.
  """
  nx, ny, nz, nt = (int(d) for d in dims)
  axes = [o + s * np.arange(n) for o, s, n in zip(
      origin, spacings, (nx, ny, nz, nt))]
  velocity = np.empty((nt, nz, ny, nx, 3))
  for it, t in enumerate(axes[3]):
    for iz, z in enumerate(axes[2]):
      for iy, y in enumerate(axes[1]):
        for ix, x in enumerate(axes[0]):
          velocity[it, iz, iy, ix] = wind_field.sample(
              np.array([x, y, -z]), t)
  return GridWindField((nx, ny, nz, nt), spacings, origin, velocity)


def _regular_axis(values, name, path):
  nodes = np.unique(values)
  if len(nodes) == 1:
    return nodes, 1.0
  steps = np.diff(nodes)
  if not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-9):
    raise ValueError('{}: {} coordinates are not evenly spaced.'.format(
        path, name))
  return nodes, float(steps[0])


def grid_from_csv(path):
  """Build a `GridWindField` from a CSV of `t,x,y,z,wn,we,wd` rows.

  Every combination of the distinct `t`, `x`, `y` and `z` values must appear
  exactly once, and each coordinate must be evenly spaced. Row order does not
  matter.

  Raises:
    recording.FormatError: the columns are wrong.
    ValueError: the rows do not form a complete regular grid.
  """
  table = recording.read_csv(path)
  recording.require_columns(table, CSV_COLUMNS, path)
  rows = table.rows
  axes, spacings = [], []
  for column, name in ((1, 'x'), (2, 'y'), (3, 'z'), (0, 't')):
    nodes, spacing = _regular_axis(rows[:, column], name, path)
    axes.append(nodes)
    spacings.append(spacing)
  dims = tuple(len(a) for a in axes)
  nx, ny, nz, nt = dims
  if len(rows) != nx * ny * nz * nt:
    raise ValueError('{}: {} rows do not fill a {}x{}x{}x{} grid.'.format(
        path, len(rows), nx, ny, nz, nt))

  indices = [np.rint((rows[:, col] - axis[0]) / step).astype(np.int64)
             for col, axis, step in zip((1, 2, 3, 0), axes, spacings)]
  velocity = np.full((nt, nz, ny, nx, 3), np.nan)
  ix, iy, iz, it = indices
  velocity[it, iz, iy, ix] = rows[:, 4:7]
  if np.isnan(velocity).any():
    raise ValueError('{}: some grid nodes are listed twice and others are '
                     'missing.'.format(path))
  origin = tuple(float(a[0]) for a in axes)
  return GridWindField(dims, spacings, origin, velocity)


def describe_grid(field):
  return collections.OrderedDict([
      ('dims', list(field.dims)),
      ('spacings', list(field.spacings)),
      ('origin', list(field.origin)),
  ])

