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

"""Wind sources and the signal generators behind them.

The `WindField` abstract class is what a `Simulator` samples at every step.
Ready-made subclasses live in `prefab_parts/winds.py`; gridded wind files are
handled in `grid.py`. This module holds the mathematics they share:

* random piecewise-constant wind signals;
* the Dryden turbulence filters (first order for the longitudinal component,
  second order for the transverse ones), discretized with the bilinear
  transform and driven by white noise;
* the parametric turbulence spectrum and sum-of-sinusoids synthesis from it.

Turbulence conventions. The Dryden filters

    H_u(s) = sigma_u sqrt(2 V / L_u) / (s + V / L_u)
    H_v(s) = sigma_v sqrt(3 V / L_v) (s + V / (sqrt(3) L_v)) / (s + V / L_v)^2

(and `H_w` like `H_v`) produce a process of variance sigma^2 when driven by
unit-intensity white noise. We realize that noise as standard normal draws
divided by `sqrt(dt)`, so the output variance does not depend on the update
step. In wavenumber `Omega = omega / V` the one-sided spectrum of `H_u` is
exactly `dryden_spectrum` with `(a, b, c) = (0, 1, 1)` at length `L_u`, and
that of `H_v` is the same form with `(a, b, c) = (12, 4, 2)` at length `L_v / 2`.
`SpectralParams.longitudinal` and `SpectralParams.transverse` build those.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import abc
import collections

import numpy as np
from scipy import signal

from quadwind import quadsim

import six


# Samples synthesized or filtered per vectorized block.
BLOCK_SIZE = 4096


@six.add_metaclass(abc.ABCMeta)
class WindField(object):
  """A source of wind velocity, sampled by position and time.

  Every wind field has a `mean_wind` (Vec3, NED, m/s) and answers `sample`
  queries with the total wind at a point. Subclasses that carry random state
  rebuild it in `reset(seed)`, so that one seed always yields one wind
  history. Fields with internal state (filters, segment schedules) expect
  `sample` to be called with non-decreasing times and are owned by one
  simulation run at a time.

  The `Simulator` calls `prepare` once when it is armed, then `reset`, then
  `sample` once per step.
  """

  def __init__(self, mean_wind=(0.0, 0.0, 0.0)):
    self._mean_wind = quadsim.vec3(mean_wind, 'mean_wind')

  @property
  def mean_wind(self):
    return self._mean_wind

  def prepare(self, dt, the_plot):
    """Learn the simulation step and get a `Plot` for logging. Optional."""

  def reset(self, seed=None):
    """Rebuild random state from `seed`. Deterministic fields ignore this."""

  @abc.abstractmethod
  def sample(self, position, t):
    """Wind velocity (Vec3, NED, m/s) at `position` (NED, m) and time `t`."""

  def describe(self):
    """A JSON-friendly dict describing this field, for provenance records."""
    return {'kind': type(self).__name__,
            'mean_wind': [float(x) for x in self._mean_wind]}


### Piecewise-constant random winds ###


class PiecewiseConstantSignal(collections.namedtuple(
    'PiecewiseConstantSignal', ['start_times', 'values', 'duration'])):
  """A wind signal that is constant between breakpoints.

  * `start_times`: increasing segment start times, the first one 0.
  * `values`: one NED wind Vec3 per segment, shape `(segments, 3)`.
  * `duration`: the time the segments cover. Queries beyond it hold the last
    value.
  """
  __slots__ = ()

  def value_at(self, t):
    """Wind at time(s) `t`; accepts scalars or arrays."""
    index = np.searchsorted(self.start_times, t, side='right') - 1
    index = np.clip(index, 0, len(self.start_times) - 1)
    return self.values[index]

  @property
  def jump_times(self):
    return self.start_times[1:]


def piecewise_constant_wind(seed, amplitude_range=(-7.0, 7.0),
                            interval_range=(0.0, 15.0), duration=1800.0):
  """Random piecewise-constant horizontal wind.

  Segment lengths are drawn uniformly from `interval_range` (zero-length draws
  are redrawn); each segment's north and east components are independent
  uniform draws from `amplitude_range`. The vertical component is zero.

  Args:
    seed: seed for `np.random.RandomState`.
    amplitude_range: `(low, high)` wind component bounds, m/s.
    interval_range: `(low, high)` segment length bounds, s, with
        `0 <= low <= high` and `high > 0`.
    duration: total signal length, s.

  Returns:
    a `PiecewiseConstantSignal`.

  Raises:
    ValueError: on an empty or inverted range or non-positive duration.
  """
  low, high = (float(x) for x in amplitude_range)
  shortest, longest = (float(x) for x in interval_range)
  if low > high:
    raise ValueError('amplitude_range must be (low, high); got {}.'.format(
        amplitude_range))
  if shortest < 0 or longest <= 0 or shortest > longest:
    raise ValueError('interval_range must satisfy 0 <= low <= high, high > 0; '
                     'got {}.'.format(interval_range))
  if not duration > 0:
    raise ValueError('duration must be positive; got {}.'.format(duration))

  random_state = np.random.RandomState(seed)
  start_times, values = [], []
  t = 0.0
  while t < duration:
    length = 0.0
    while length <= 0.0:
      length = random_state.uniform(shortest, longest)
    start_times.append(t)
    values.append([random_state.uniform(low, high),
                   random_state.uniform(low, high), 0.0])
    t += length
  return PiecewiseConstantSignal(np.array(start_times),
                                 np.array(values, dtype=np.float64),
                                 float(duration))


### Dryden turbulence ###


class DrydenParams(collections.namedtuple(
    'DrydenParams', ['sigma', 'length_scale', 'airspeed', 'update_dt'])):
  """Parameters of the Dryden gust filters.

  * `sigma`: turbulence intensities `(sigma_u, sigma_v, sigma_w)`, m/s.
  * `length_scale`: `(L_u, L_v, L_w)`, m. Default 200 m on every axis.
  * `airspeed`: the expected mean airspeed `V_a0`, m/s. Default 5 m/s. The
    filters degenerate to zero output at zero airspeed, so it must be positive.
  * `update_dt`: filter update period, s, or None to update at the simulation
    step.
  """
  __slots__ = ()

  def __new__(cls, sigma=(1.06, 1.06, 0.7), length_scale=(200.0, 200.0, 200.0),
              airspeed=5.0, update_dt=None):
    sigma = quadsim.vec3(sigma, 'sigma')
    length_scale = quadsim.vec3(length_scale, 'length_scale')
    if np.any(sigma < 0):
      raise ValueError('Dryden sigma must be non-negative; got {}.'.format(
          sigma))
    if np.any(length_scale <= 0):
      raise ValueError('Dryden length scales must be positive; got {}.'.format(
          length_scale))
    if not airspeed > 0:
      raise ValueError('The Dryden airspeed V_a0 must be positive; got {}. The '
                       'filters produce no turbulence at zero airspeed.'.format(
                           airspeed))
    if update_dt is not None and not update_dt > 0:
      raise ValueError('update_dt must be positive or None; got {}.'.format(
          update_dt))
    return super(DrydenParams, cls).__new__(
        cls, sigma, length_scale, float(airspeed),
        None if update_dt is None else float(update_dt))


def dryden_transfer_functions(params):
  """Continuous `(numerator, denominator)` pairs for H_u, H_v and H_w."""
  functions = []
  for axis in range(3):
    sigma = params.sigma[axis]
    pole = params.airspeed / params.length_scale[axis]
    if axis == 0:
      gain = sigma * np.sqrt(2.0 * pole)
      functions.append((np.array([gain]), np.array([1.0, pole])))
    else:
      gain = sigma * np.sqrt(3.0 * pole)
      functions.append((gain * np.array([1.0, pole / np.sqrt(3.0)]),
                        np.array([1.0, 2.0 * pole, pole * pole])))
  return functions


class DrydenFilter(object):
  """Discretized Dryden filters and their state, for one update period.

  Coefficients come from the bilinear (Tustin) transform of
  `dryden_transfer_functions` at sample rate `1 / dt`. The filter state is the
  direct-form-II-transposed delay line `scipy.signal.lfilter` keeps, so
  `dryden_step` and `dryden_series` advance the same state and produce the
  same sequence from the same noise.
  """

  def __init__(self, params, dt):
    if not dt > 0:
      raise ValueError('Dryden update dt must be positive; got {}.'.format(dt))
    self._params = params
    self._dt = float(dt)
    self._coefficients = [
        signal.bilinear(num, den, fs=1.0 / self._dt)
        for num, den in dryden_transfer_functions(params)]
    self._state = [np.zeros(max(len(a), len(b)) - 1)
                   for b, a in self._coefficients]

  @property
  def params(self):
    return self._params

  @property
  def dt(self):
    return self._dt

  @property
  def coefficients(self):
    return list(self._coefficients)

  def reset(self):
    self._state = [np.zeros_like(zi) for zi in self._state]

  def filter(self, noise):
    """Filter standard normal `noise` of shape `(steps, 3)`; advance state."""
    noise = np.asarray(noise, dtype=np.float64)
    scaled = noise / np.sqrt(self._dt)
    output = np.empty_like(scaled)
    for axis, (b, a) in enumerate(self._coefficients):
      output[:, axis], self._state[axis] = signal.lfilter(
          b, a, scaled[:, axis], zi=self._state[axis])
    return output


def dryden_step(dryden_filter, dt, noise):
  """Advance the Dryden filters one update period.

  Args:
    dryden_filter: a `DrydenFilter`.
    dt: the step, s; must match the period the filter was discretized for.
    noise: three standard normal draws.

  Returns:
    the turbulent fluctuation, Vec3 in m/s, to add to the mean wind.

  Raises:
    ValueError: `dt` is not positive or differs from the filter's period.
  """
  if not dt > 0:
    raise ValueError('dryden_step needs a positive dt; got {}.'.format(dt))
  if not np.isclose(dt, dryden_filter.dt, rtol=1e-12, atol=0.0):
    raise ValueError('This DrydenFilter was discretized for dt={}; got '
                     'dt={}.'.format(dryden_filter.dt, dt))
  noise = np.asarray(noise, dtype=np.float64).reshape(1, 3)
  return dryden_filter.filter(noise)[0]


def dryden_series(dryden_filter, random_state, steps):
  """`steps` consecutive Dryden fluctuations, shape `(steps, 3)`.

  Draws the noise from `random_state` (three standard normal values per step,
  in step order) exactly as repeated `dryden_step` calls fed from the same
  stream would.
  """
  return dryden_filter.filter(random_state.randn(steps, 3))


### Turbulence spectrum and spectral synthesis ###


class SpectralParams(collections.namedtuple(
    'SpectralParams', ['sigma', 'length_scale', 'a', 'b', 'c', 'bins',
                       'wavenumber_range', 'mean', 'airspeed'])):
  """One velocity component's spectrum and its discretization.

  * `sigma` (m/s), `length_scale` (m), and shape constants `a`, `b`, `c` of
    `Phi(Omega) = sigma^2 (2L/pi) (1 + a (L Omega)^2) / (1 + b (L Omega)^2)^c`.
  * `bins`: number of wavenumber bins N.
  * `wavenumber_range`: `(Omega_min, Omega_max)` in rad/m; None spans
    `(0, 50 / L)`.
  * `mean`: the mean value `u_0` the fluctuations are added to, m/s.
  * `airspeed`: `V_a0`, m/s, mapping wavenumber to temporal frequency.
  """
  __slots__ = ()

  def __new__(cls, sigma=1.06, length_scale=200.0, a=0.0, b=1.0, c=1.0,
              bins=1000, wavenumber_range=None, mean=0.0, airspeed=5.0):
    if sigma < 0:
      raise ValueError('sigma must be non-negative; got {}.'.format(sigma))
    if not length_scale > 0:
      raise ValueError('length_scale must be positive; got {}.'.format(
          length_scale))
    if not (b > 0 and c > 0):
      raise ValueError('Spectral shape constants b and c must be positive; '
                       'got b={}, c={}.'.format(b, c))
    if int(bins) < 1:
      raise ValueError('bins must be at least 1; got {}.'.format(bins))
    if wavenumber_range is None:
      wavenumber_range = (0.0, 50.0 / length_scale)
    low, high = (float(x) for x in wavenumber_range)
    if not 0 <= low < high:
      raise ValueError('wavenumber_range must satisfy 0 <= low < high; got '
                       '{}.'.format(wavenumber_range))
    if not airspeed > 0:
      raise ValueError('airspeed must be positive; got {}.'.format(airspeed))
    return super(SpectralParams, cls).__new__(
        cls, float(sigma), float(length_scale), float(a), float(b), float(c),
        int(bins), (low, high), float(mean), float(airspeed))

  @classmethod
  def longitudinal(cls, sigma, length_scale, **kwargs):
    """The spectrum of the longitudinal Dryden filter."""
    return cls(sigma, length_scale, a=0.0, b=1.0, c=1.0, **kwargs)

  @classmethod
  def transverse(cls, sigma, length_scale, **kwargs):
    """The spectrum of a transverse Dryden filter with scale `length_scale`."""
    kwargs.setdefault('wavenumber_range', (0.0, 50.0 / length_scale))
    return cls(sigma, 0.5 * length_scale, a=12.0, b=4.0, c=2.0, **kwargs)

  @property
  def bin_width(self):
    low, high = self.wavenumber_range
    return (high - low) / self.bins

  @property
  def wavenumbers(self):
    """Bin centres `Omega_i`, rad/m."""
    low = self.wavenumber_range[0]
    return low + (np.arange(self.bins) + 0.5) * self.bin_width


def dryden_spectrum(params, wavenumber):
  """Spectral energy density `Phi(Omega)`, (m/s)^2 per rad/m.

  Args:
    params: `SpectralParams`; only the spectrum fields are used.
    wavenumber: `Omega` in rad/m, scalar or array, non-negative.

  Raises:
    ValueError: a wavenumber is negative.
  """
  omega = np.asarray(wavenumber, dtype=np.float64)
  if np.any(omega < 0):
    raise ValueError('Wavenumbers must be non-negative.')
  scaled_sq = (params.length_scale * omega) ** 2
  density = (params.sigma ** 2 * 2.0 * params.length_scale / np.pi *
             (1.0 + params.a * scaled_sq) /
             (1.0 + params.b * scaled_sq) ** params.c)
  return float(density) if density.ndim == 0 else density


class SpectralComponents(collections.namedtuple(
    'SpectralComponents', ['amplitudes', 'wavenumbers', 'phases', 'mean',
                           'airspeed'])):
  """A drawn sum of sinusoids `u_0 + sum_i a_i sin(Omega_i x + phi_i)`."""
  __slots__ = ()

  def spatial(self, positions):
    """Evaluate at along-track positions (m)."""
    return self._evaluate(positions, self.wavenumbers)

  def temporal(self, times):
    """Evaluate at times (s), using `omega_i = Omega_i V_a0`."""
    return self._evaluate(times, self.wavenumbers * self.airspeed)

  def _evaluate(self, points, frequencies):
    points = np.asarray(points, dtype=np.float64)
    flat = points.reshape(-1)
    values = np.empty_like(flat)
    for start in six.moves.range(0, len(flat), BLOCK_SIZE):
      block = flat[start:start + BLOCK_SIZE]
      values[start:start + BLOCK_SIZE] = np.sin(
          np.outer(block, frequencies) + self.phases).dot(self.amplitudes)
    return (self.mean + values).reshape(points.shape)

  @property
  def variance(self):
    """Variance of the signal over its period: sum(a_i^2) / 2."""
    return float(np.sum(self.amplitudes ** 2) / 2.0)


def spectral_components(params, random_state):
  """Draw random phases for `params` and compute the amplitudes.

  Amplitudes are `a_i = sqrt(dOmega Phi(Omega_i))`; phases are uniform on
  `[0, 2 pi)`, drawn from `random_state` in bin order.
  """
  wavenumbers = params.wavenumbers
  amplitudes = np.sqrt(params.bin_width * dryden_spectrum(params, wavenumbers))
  phases = random_state.uniform(0.0, 2.0 * np.pi, size=params.bins)
  return SpectralComponents(amplitudes, wavenumbers, phases, params.mean,
                            params.airspeed)


def synth_spectral_signal(params, seed, positions=None, times=None):
  """Synthesize one velocity component from its spectrum.

  Exactly one of `positions` (spatial synthesis) and `times` (temporal
  synthesis) must be given.

  Args:
    params: `SpectralParams`.
    seed: seed for `np.random.RandomState`, or a `RandomState`.
    positions: along-track positions, m.
    times: times, s.

  Returns:
    the signal in m/s, shaped like `positions` or `times`.

  Raises:
    ValueError: neither or both of `positions` and `times` were given.
  """
  if (positions is None) == (times is None):
    raise ValueError('Give exactly one of positions or times.')
  random_state = (seed if isinstance(seed, np.random.RandomState)
                  else np.random.RandomState(seed))
  components = spectral_components(params, random_state)
  if positions is not None:
    return components.spatial(positions)
  return components.temporal(times)
