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

""""Prefabricated" `WindField`s for every wind source quadwind flies through."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import numpy as np

from quadwind import grid
from quadwind import quadsim
from quadwind import recording
from quadwind import wind

import six


# Update period for Dryden filters never told the simulation step.
DEFAULT_UPDATE_DT = 0.001
SIGNAL_COLUMNS = ('t', 'wn', 'we', 'wd')


class ConstantWind(wind.WindField):
  """The same wind everywhere, always."""

  def sample(self, position, t):
    return self.mean_wind.copy()


class PiecewiseConstantWind(wind.WindField):
  """Random horizontal wind that jumps to a new value at random times.

  A new schedule is drawn on every `reset(seed)` with
  `wind.piecewise_constant_wind`; the wind is the schedule's value plus
  `mean_wind`. Defaults: components uniform in [-7, 7] m/s, segments
  uniform in (0, 15] s.
  """

  def __init__(self, duration, amplitude_range=(-7.0, 7.0),
               interval_range=(0.0, 15.0), mean_wind=(0.0, 0.0, 0.0)):
    super(PiecewiseConstantWind, self).__init__(mean_wind)
    self._duration = float(duration)
    self._amplitude_range = tuple(amplitude_range)
    self._interval_range = tuple(interval_range)
    self._signal = None
    self._seed = None

  @property
  def signal(self):
    if self._signal is None:
      self.reset()
    return self._signal

  def reset(self, seed=None):
    self._seed = seed
    self._signal = wind.piecewise_constant_wind(
        seed, self._amplitude_range, self._interval_range, self._duration)

  def sample(self, position, t):
    return self.mean_wind + self.signal.value_at(t)

  def describe(self):
    description = super(PiecewiseConstantWind, self).describe()
    description.update(duration=self._duration,
                       amplitude_range=list(self._amplitude_range),
                       interval_range=list(self._interval_range),
                       seed=self._seed)
    return description


class DrydenWind(wind.WindField):
  """Mean wind plus Dryden turbulence.

  The filters advance once per update period (the `DrydenParams.update_dt`,
  or the simulation step when that is None). Noise comes from a
  `RandomState` seeded by `reset`, and is generated in blocks with
  `wind.dryden_series`, which gives the same sequence as stepping the filters
  one update at a time. An optional spin-up runs the filters for `spinup`
  seconds before time zero so that the turbulence starts statistically
  stationary.

  Samples must be requested in non-decreasing time order.
  """

  def __init__(self, mean_wind=(0.0, 0.0, 0.0), params=None, spinup=0.0):
    super(DrydenWind, self).__init__(mean_wind)
    self._params = params if params is not None else wind.DrydenParams()
    if spinup < 0:
      raise ValueError('spinup must be non-negative; got {}.'.format(spinup))
    self._spinup = float(spinup)
    self._simulation_dt = None
    self._the_plot = None
    self._seed = None
    self._filter = None

  @property
  def params(self):
    return self._params

  @property
  def update_dt(self):
    return (self._params.update_dt or self._simulation_dt or
            DEFAULT_UPDATE_DT)

  def prepare(self, dt, the_plot):
    self._simulation_dt = dt
    self._the_plot = the_plot

  def reset(self, seed=None):
    self._seed = seed
    self._random_state = np.random.RandomState(seed)
    self._filter = wind.DrydenFilter(self._params, self.update_dt)
    self._block = np.zeros((0, 3))
    self._block_start = 0
    spinup_steps = int(round(self._spinup / self.update_dt))
    if spinup_steps:
      wind.dryden_series(self._filter, self._random_state, spinup_steps)
      if self._the_plot is not None:
        self._the_plot.log('Dryden filters spun up for {:g} s ({} updates).'
                           .format(self._spinup, spinup_steps))

  def sample(self, position, t):
    if self._filter is None:
      self.reset()
    index = int(np.floor(t / self.update_dt + 1e-9))
    if index < self._block_start:
      raise ValueError('DrydenWind was asked for t={} after moving past it; '
                       'sample in time order or reset first.'.format(t))
    while index >= self._block_start + len(self._block):
      self._block_start += len(self._block)
      self._block = wind.dryden_series(self._filter, self._random_state,
                                       wind.BLOCK_SIZE)
    return self.mean_wind + self._block[index - self._block_start]

  def describe(self):
    description = super(DrydenWind, self).describe()
    description.update(sigma=[float(s) for s in self._params.sigma],
                       length_scale=[float(l) for l in
                                     self._params.length_scale],
                       airspeed=self._params.airspeed,
                       update_dt=self.update_dt, spinup=self._spinup,
                       seed=self._seed)
    return description


class SpectralWind(wind.WindField):
  """Mean wind plus turbulence synthesized as sums of sinusoids.

  One `SpectralParams` per NED component. In `'temporal'` mode the sum is
  evaluated at the sample time (frequencies `Omega_i V_a0`); in `'spatial'`
  mode it is evaluated at the north coordinate, the along-track distance of
  the straight-line flights flown here. Phases are redrawn by `reset(seed)`.
  """

  MODES = ('temporal', 'spatial')

  def __init__(self, component_params, mean_wind=(0.0, 0.0, 0.0),
               mode='temporal'):
    super(SpectralWind, self).__init__(mean_wind)
    component_params = tuple(component_params)
    if len(component_params) != 3:
      raise ValueError('SpectralWind needs one SpectralParams per component; '
                       'got {}.'.format(len(component_params)))
    if mode not in self.MODES:
      raise ValueError('mode must be one of {}; got {!r}.'.format(
          self.MODES, mode))
    self._params = component_params
    self._mode = mode
    self._components = None
    self._seed = None

  @classmethod
  def from_dryden(cls, mean_wind, dryden_params, bins=1000, mode='temporal'):
    """Spectra matching the Dryden filters of `dryden_params`."""
    sigma, scale = dryden_params.sigma, dryden_params.length_scale
    airspeed = dryden_params.airspeed
    params = (
        wind.SpectralParams.longitudinal(sigma[0], scale[0], bins=bins,
                                         airspeed=airspeed),
        wind.SpectralParams.transverse(sigma[1], scale[1], bins=bins,
                                       airspeed=airspeed),
        wind.SpectralParams.transverse(sigma[2], scale[2], bins=bins,
                                       airspeed=airspeed))
    return cls(params, mean_wind, mode)

  def reset(self, seed=None):
    self._seed = seed
    random_state = np.random.RandomState(seed)
    self._components = [wind.spectral_components(p, random_state)
                        for p in self._params]

  def sample(self, position, t):
    if self._components is None:
      self.reset()
    if self._mode == 'temporal':
      values = [c.temporal(t) for c in self._components]
    else:
      values = [c.spatial(position[0]) for c in self._components]
    return self.mean_wind + np.array([float(v) for v in values])

  def describe(self):
    description = super(SpectralWind, self).describe()
    description.update(mode=self._mode, seed=self._seed, components=[
        dict(sigma=p.sigma, length_scale=p.length_scale, a=p.a, b=p.b, c=p.c,
             bins=p.bins, wavenumber_range=list(p.wavenumber_range))
        for p in self._params])
    return description


class SignalWind(wind.WindField):
  """Playback of a tabulated wind signal `(t, w_n, w_e, w_d)`.

  Linear in time between samples and held at the end values outside them.
  The signal is the total wind; `mean_wind` is reported as its average.
  """

  def __init__(self, times, values):
    times = np.asarray(times, dtype=np.float64).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1, 3)
    if len(times) == 0 or values.shape[0] != len(times):
      raise ValueError('SignalWind needs one wind vector per time; got {} '
                       'times and {} vectors.'.format(len(times),
                                                      values.shape[0]))
    if np.any(np.diff(times) <= 0):
      raise ValueError('SignalWind times must be strictly increasing.')
    super(SignalWind, self).__init__(values.mean(axis=0))
    self._times = times
    self._values = values
    self.provenance = {}

  @classmethod
  def from_csv(cls, path):
    table = recording.read_csv(path)
    recording.require_columns(table, SIGNAL_COLUMNS, path)
    signal_wind = cls(table.rows[:, 0], table.rows[:, 1:4])
    signal_wind.provenance = dict(table.provenance)
    return signal_wind

  @property
  def times(self):
    return self._times

  @property
  def values(self):
    return self._values

  def sample(self, position, t):
    return np.array([np.interp(t, self._times, self._values[:, axis])
                     for axis in six.moves.range(3)])

  def describe(self):
    description = super(SignalWind, self).describe()
    description.update(samples=len(self._times),
                       span=[float(self._times[0]), float(self._times[-1])],
                       source={k: v for k, v in six.iteritems(self.provenance)})
    return description


class GridWind(wind.WindField):
  """Wind replayed from a `grid.GridWindField`, plus `mean_wind`."""

  def __init__(self, field, mean_wind=(0.0, 0.0, 0.0)):
    super(GridWind, self).__init__(mean_wind)
    self._field = field

  @classmethod
  def from_file(cls, path, mean_wind=(0.0, 0.0, 0.0)):
    return cls(grid.load_grid_wind(path), mean_wind)

  @property
  def field(self):
    return self._field

  def sample(self, position, t):
    position = quadsim.vec3(position, 'position')
    return self.mean_wind + grid.sample_grid(self._field, position, t)

  def describe(self):
    description = super(GridWind, self).describe()
    description.update(grid.describe_grid(self._field))
    return description
