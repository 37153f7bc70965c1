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

"""How good is a wind estimate?

Errors are always `epsilon = true - estimate`, per north/east component.
Standard deviations are sample standard deviations (`ddof=1`) of the true
wind over the evaluation window. Samples flagged as warm-up are left out of
every measure.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import io

import numpy as np
from scipy import linalg

from quadwind import recording

import six


HISTOGRAM_COLUMNS = ('bin_left', 'bin_right', 'count')
DIRECTION_EPSILON = 1e-9


class CovarianceError(ValueError):
  """A covariance matrix is not symmetric positive definite."""


def _pair(series, name):
  series = np.asarray(series, dtype=np.float64)
  if series.ndim != 2 or series.shape[1] != 2:
    raise ValueError('{} must have shape (N, 2); got {}.'.format(
        name, series.shape))
  return series


def _aligned(true_series, est_series):
  true_series = _pair(true_series, 'true_series')
  est_series = _pair(est_series, 'est_series')
  if true_series.shape != est_series.shape:
    raise ValueError('Series are not aligned: {} vs {} samples.'.format(
        len(true_series), len(est_series)))
  return true_series, est_series


class NormalizedErrors(collections.namedtuple(
    'NormalizedErrors', ['mae_ratio', 'std_ratio', 'mean_error', 'sigma',
                         'zero_variance'])):
  """Per-component error summary, each field a 2-array (north, east).

  * `mae_ratio`: `mean|epsilon| / sigma`.
  * `std_ratio`: `sigma_epsilon / sigma`.
  * `mean_error`: `mean(epsilon)`, m/s.
  * `sigma`: sample standard deviation of the true wind, m/s.
  * `zero_variance`: True where the true wind never varies; the two ratios
    then hold the unnormalized `mean|epsilon|` and `sigma_epsilon`.
  """
  __slots__ = ()


def normalized_errors(true_series, est_series):
  """`NormalizedErrors` of `est_series` against `true_series`."""
  true_series, est_series = _aligned(true_series, est_series)
  errors = true_series - est_series
  sigma = np.std(true_series, axis=0, ddof=1)
  zero_variance = ~(sigma > 0)
  divisor = np.where(zero_variance, 1.0, sigma)
  mae = np.mean(np.abs(errors), axis=0)
  error_std = np.std(errors, axis=0, ddof=1)
  return NormalizedErrors(mae / divisor, error_std / divisor,
                          errors.mean(axis=0), sigma, zero_variance)


def mean_error(true_series, est_series):
  true_series, est_series = _aligned(true_series, est_series)
  return (true_series - est_series).mean(axis=0)


def _check_spd(matrix, name):
  matrix = np.asarray(matrix, dtype=np.float64)
  if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
    raise CovarianceError('{} must be a square matrix; got shape {}.'.format(
        name, matrix.shape))
  if not np.all(np.isfinite(matrix)) or not np.allclose(matrix, matrix.T):
    raise CovarianceError('{} must be finite and symmetric.'.format(name))
  try:
    linalg.cholesky(matrix)
  except linalg.LinAlgError:
    raise CovarianceError('{} is not positive definite.'.format(name))
  return matrix


def covariance_distance(a, b):
  """`sqrt(sum(ln^2 lambda_i))` over the roots of `|lambda A - B| = 0`.

  Raises:
    CovarianceError: `a` or `b` is not symmetric positive definite, or their
        shapes differ.
  """
  a = _check_spd(a, 'A')
  b = _check_spd(b, 'B')
  if a.shape != b.shape:
    raise CovarianceError('A and B differ in shape: {} vs {}.'.format(
        a.shape, b.shape))
  eigenvalues = linalg.eigvalsh(b, a)
  return float(np.sqrt(np.sum(np.log(eigenvalues) ** 2)))


def direction_error(true, est):
  """Angle in [0, pi] between two horizontal wind vectors; NaN if either is 0.
  """
  true_n, true_e = true
  est_n, est_e = est
  if (np.hypot(true_n, true_e) < DIRECTION_EPSILON or
      np.hypot(est_n, est_e) < DIRECTION_EPSILON):
    return float('nan')
  delta = np.arctan2(true_n, true_e) - np.arctan2(est_n, est_e)
  return float(np.arccos(np.clip(np.cos(delta), -1.0, 1.0)))


def direction_errors(true_series, est_series):
  """Direction errors of all samples where both vectors are nonzero.

  Returns:
    a 2-tuple `(errors, excluded)`: the defined errors and the number of
    samples left out.
  """
  true_series, est_series = _aligned(true_series, est_series)
  defined = ((np.hypot(true_series[:, 0], true_series[:, 1]) >=
              DIRECTION_EPSILON) &
             (np.hypot(est_series[:, 0], est_series[:, 1]) >=
              DIRECTION_EPSILON))
  delta = (np.arctan2(true_series[defined, 0], true_series[defined, 1]) -
           np.arctan2(est_series[defined, 0], est_series[defined, 1]))
  errors = np.arccos(np.clip(np.cos(delta), -1.0, 1.0))
  return errors, int(np.count_nonzero(~defined))


def speed_error(true_series, est_series):
  """Per-sample `|true| - |estimate|` of the horizontal wind, m/s."""
  true_series, est_series = _aligned(true_series, est_series)
  return (np.hypot(true_series[:, 0], true_series[:, 1]) -
          np.hypot(est_series[:, 0], est_series[:, 1]))


class OffDiagonal(collections.namedtuple(
    'OffDiagonal', ['true', 'estimate', 'sign_agrees'])):
  """North/east covariance of the true and estimated wind."""
  __slots__ = ()


def off_diagonal_covariance(true_series, est_series):
  true_series, est_series = _aligned(true_series, est_series)
  true_term = float(np.cov(true_series, rowvar=False, ddof=1)[0, 1])
  est_term = float(np.cov(est_series, rowvar=False, ddof=1)[0, 1])
  return OffDiagonal(true_term, est_term,
                     bool(np.sign(true_term) == np.sign(est_term)))


class Histogram(collections.namedtuple('Histogram', ['edges', 'counts'])):
  """Counts of `epsilon / sigma` in bins of equal width centred on zero."""
  __slots__ = ()

  def rows(self):
    return np.column_stack([self.edges[:-1], self.edges[1:], self.counts])


def error_histogram(errors, sigma, bin_width=0.1):
  """Histogram of `errors / sigma`.

  Bins are `[(k - 1/2) w, (k + 1/2) w)` for whole `k`, covering every value,
  so identical series give a single spike in the bin around zero.
  """
  if not bin_width > 0:
    raise ValueError('bin_width must be positive; got {}.'.format(bin_width))
  scaled = np.asarray(errors, dtype=np.float64).reshape(-1) / (
      sigma if sigma > 0 else 1.0)
  scaled = scaled[np.isfinite(scaled)]
  reach = int(np.ceil(np.max(np.abs(scaled)) / bin_width + 0.5)) if (
      scaled.size) else 1
  edges = (np.arange(-reach, reach + 2) - 0.5) * bin_width
  counts, _ = np.histogram(scaled, bins=edges)
  return Histogram(edges, counts)


### Reports ###


class MetricsReport(collections.namedtuple(
    'MetricsReport', ['method', 'normalized', 'covariance_distance',
                      'direction_mean_error', 'direction_error_variance',
                      'direction_excluded', 'speed_mean_error',
                      'speed_error_variance', 'off_diagonal', 'sample_count',
                      'warmup_excluded'])):
  """All measures for one estimate series.

  `normalized` is a `NormalizedErrors`, `off_diagonal` an `OffDiagonal`;
  direction statistics are in rad and rad^2, speed statistics in m/s and
  (m/s)^2.
  """
  __slots__ = ()

  def as_dict(self):
    values = collections.OrderedDict()
    values['method'] = self.method
    for index, axis in enumerate(('north', 'east')):
      values[axis + '_mae_ratio'] = float(self.normalized.mae_ratio[index])
      values[axis + '_std_ratio'] = float(self.normalized.std_ratio[index])
      values[axis + '_mean_error'] = float(self.normalized.mean_error[index])
      values[axis + '_sigma'] = float(self.normalized.sigma[index])
      values[axis + '_zero_variance'] = bool(
          self.normalized.zero_variance[index])
    values['covariance_distance'] = self.covariance_distance
    values['off_diagonal_true'] = self.off_diagonal.true
    values['off_diagonal_estimate'] = self.off_diagonal.estimate
    values['off_diagonal_sign_agrees'] = self.off_diagonal.sign_agrees
    values['direction_mean_error'] = self.direction_mean_error
    values['direction_error_variance'] = self.direction_error_variance
    values['direction_excluded'] = self.direction_excluded
    values['speed_mean_error'] = self.speed_mean_error
    values['speed_error_variance'] = self.speed_error_variance
    values['sample_count'] = self.sample_count
    values['warmup_excluded'] = self.warmup_excluded
    return values


def evaluation_mask(series_list):
  """Samples every series has a value for: the shared evaluation window."""
  mask = np.ones(len(series_list[0].times), dtype=bool)
  for series in series_list:
    if len(series.times) != len(mask):
      raise ValueError('Estimate series differ in length: {} vs {}.'.format(
          len(series.times), len(mask)))
    mask &= ~np.asarray(series.warmup, dtype=bool)
  return mask


def evaluate(series, mask=None, the_plot=None):
  """A `MetricsReport` for one `estimate.EstimateSeries`.

  Args:
    series: the estimates and the true wind.
    mask: samples to evaluate; default every sample outside the warm-up.
    the_plot: optional `Plot` for messages about excluded samples.

  Raises:
    ValueError: fewer than two samples remain.
    CovarianceError: a covariance matrix is singular.
  """
  if mask is None:
    mask = ~np.asarray(series.warmup, dtype=bool)
  true_series = np.asarray(series.true)[mask]
  est_series = np.asarray(series.estimates)[mask]
  if len(true_series) < 2:
    raise ValueError('Need at least two evaluated samples; got {}.'.format(
        len(true_series)))
  excluded = int(len(mask) - np.count_nonzero(mask))

  directions, direction_excluded = direction_errors(true_series, est_series)
  speeds = speed_error(true_series, est_series)
  if the_plot is not None:
    the_plot.log('{}: {} warm-up samples excluded.'.format(series.method,
                                                          excluded))
    if direction_excluded:
      the_plot.log('{}: {} zero-speed samples left out of the direction '
                   'error.'.format(series.method, direction_excluded))
  return MetricsReport(
      series.method,
      normalized_errors(true_series, est_series),
      covariance_distance(np.cov(true_series, rowvar=False, ddof=1),
                          np.cov(est_series, rowvar=False, ddof=1)),
      float(np.mean(directions)) if directions.size else float('nan'),
      float(np.var(directions, ddof=1)) if directions.size > 1 else (
          float('nan')),
      direction_excluded,
      float(np.mean(speeds)),
      float(np.var(speeds, ddof=1)),
      off_diagonal_covariance(true_series, est_series),
      int(len(true_series)),
      excluded)


_TABLE_ROWS = (
    ('North MAE/sigma_u', lambda r: r.normalized.mae_ratio[0]),
    ('East MAE/sigma_v', lambda r: r.normalized.mae_ratio[1]),
    ('sigma_eps,n/sigma_u', lambda r: r.normalized.std_ratio[0]),
    ('sigma_eps,e/sigma_v', lambda r: r.normalized.std_ratio[1]),
    ('North Mean Error (m/s)', lambda r: r.normalized.mean_error[0]),
    ('East Mean Error (m/s)', lambda r: r.normalized.mean_error[1]),
    ('Covariance Distance', lambda r: r.covariance_distance),
    ('Off-diagonal true', lambda r: r.off_diagonal.true),
    ('Off-diagonal estimate', lambda r: r.off_diagonal.estimate),
    ('Off-diagonal sign agrees', lambda r: r.off_diagonal.sign_agrees),
    ('Direction mean error (rad)', lambda r: r.direction_mean_error),
    ('Direction error variance', lambda r: r.direction_error_variance),
    ('Speed mean error (m/s)', lambda r: r.speed_mean_error),
    ('Speed error variance', lambda r: r.speed_error_variance),
    ('Samples', lambda r: r.sample_count),
    ('Warm-up excluded', lambda r: r.warmup_excluded),
)


def _cell(value):
  if isinstance(value, (bool, np.bool_)):
    return 'yes' if value else 'no'
  if isinstance(value, (six.integer_types, np.integer)):
    return '{:d}'.format(int(value))
  return '{:.4f}'.format(float(value))


def format_report_table(reports):
  """Aligned text table, one column per report (e.g. NN and WT)."""
  header = ['Metric'] + [r.method.upper() for r in reports]
  rows = [[label] + [_cell(getter(r)) for r in reports]
          for label, getter in _TABLE_ROWS]
  widths = [max(len(row[k]) for row in [header] + rows)
            for k in six.moves.range(len(header))]
  lines = ['Errors are epsilon = true - estimate.']
  for row in [header] + rows:
    cells = [row[0].ljust(widths[0])] + [
        cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
    lines.append('  '.join(cells).rstrip())
  return '\n'.join(lines) + '\n'


def write_report(reports, path, provenance):
  """Write the aligned text table, preceded by the provenance line."""
  with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
    f.write(six.text_type(provenance) + u'\n')
    f.write(six.text_type(format_report_table(reports)))


def write_report_values(reports, path, provenance):
  """Write a machine-readable `method.key=value` file."""
  with io.open(path, 'w', encoding='utf-8', newline='\n') as f:
    f.write(six.text_type(provenance) + u'\n')
    for report in reports:
      for key, value in six.iteritems(report.as_dict()):
        if key == 'method':
          continue
        if isinstance(value, bool):
          text = 'true' if value else 'false'
        elif isinstance(value, float):
          text = '%.17g' % value
        else:
          text = str(value)
        f.write(u'{}.{}={}\n'.format(report.method, key, text))


def read_report_values(path):
  """Read a file from `write_report_values` into `{method: {key: text}}`."""
  values = collections.OrderedDict()
  with io.open(path, 'r', encoding='utf-8') as f:
    for line in f:
      line = line.strip()
      if not line or line.startswith('#'):
        continue
      key, _, text = line.partition('=')
      method, _, name = key.partition('.')
      values.setdefault(method, collections.OrderedDict())[name] = text
  return values


def write_histogram(histogram, path, provenance):
  recording.write_csv(path, HISTOGRAM_COLUMNS, histogram.rows(), provenance,
                      formats=['%.17g', '%.17g', '%d'])
