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

"""Named end-to-end experiments.

Each case flies a training run and a held-out test run, trains a network on
the first, estimates the wind of the second with the network and the wind
triangle, and writes every artifact of the chain into one directory:

    config.yaml            the merged configuration of the case
    train_log.csv          training flight
    test_log.csv           evaluation flight
    dataset.qwds           training windows
    model.qwnn             trained network and normalizer
    loss.csv               loss history
    estimates.csv          NN and WT estimates of the test flight
    report.txt             NN and WT metrics side by side
    report_values.txt      the same metrics as `method.key=value` lines
    hist_<method>_<axis>.csv  histograms of error / sigma

Files depend only on the case, the scale, the epoch override and the seed.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import io
import os

import numpy as np

from quadwind import config as config_lib
from quadwind import engine
from quadwind import estimate
from quadwind import metrics
from quadwind import recording

import six


class Case(collections.namedtuple(
    'Case', ['name', 'description', 'overrides', 'train_duration',
             'test_duration'])):
  """A named experiment: config overrides and the two flight durations (s)."""
  __slots__ = ()


CASES = collections.OrderedDict((case.name, case) for case in (
    Case('hover-dryden-1.06',
         'Hover in Dryden turbulence, sigma = (1.06, 1.06, 0.7) m/s, mean '
         'wind (1, 2, 0) m/s.',
         {'trajectory': {'kind': 'hover'},
          'wind': {'kind': 'dryden', 'mean': [1.0, 2.0, 0.0],
                   'dryden': {'sigma': [1.06, 1.06, 0.7]}}},
         4800.0, 5000.0),
    Case('line-dryden-1.06',
         'Straight-line flight due north in Dryden turbulence, sigma = (1.06, '
         '1.06, 0.7) m/s, mean wind (1, 2, 0) m/s.',
         {'trajectory': {'kind': 'line'},
          'wind': {'kind': 'dryden', 'mean': [1.0, 2.0, 0.0],
                   'dryden': {'sigma': [1.06, 1.06, 0.7]}}},
         4800.0, 5000.0),
    Case('hover-piecewise',
         'Hover in piecewise-constant wind, components in [-7, 7] m/s held '
         'for up to 15 s.',
         {'trajectory': {'kind': 'hover'},
          'wind': {'kind': 'piecewise', 'mean': [0.0, 0.0, 0.0]}},
         1800.0, 600.0),
))


def case_config(name, epochs=None, seed=None, base=None):
  """The validated configuration of case `name`.

  Args:
    name: a key of `CASES`.
    epochs: overrides `training.epochs`.
    seed: overrides the simulation seed (the evaluation flight uses
        `seed + 1`) and the training seed.
    base: configuration the case overrides are merged into; default the
        packaged defaults.

  Raises:
    KeyError: unknown case.
    config.ConfigError: the result is invalid.
  """
  case = CASES[name]
  merged = config_lib.merge(base or config_lib.default_config(),
                            case.overrides)
  merged['simulation']['duration'] = case.train_duration
  merged['evaluation']['duration'] = case.test_duration
  if epochs is not None:
    merged['training']['epochs'] = epochs
  if seed is not None:
    merged['simulation']['seed'] = seed
    merged['evaluation']['seed'] = seed + 1
    merged['training']['seed'] = seed
  return config_lib.validate(merged)


def fly(config, duration, seed, the_plot=None, wind_field=None):
  """Simulate the configured trajectory for `duration` s with wind `seed`.

  `wind_field` replaces the configured wind. The returned log's metadata
  carries the trajectory kind and config hash.
  """
  if wind_field is None:
    wind_field = config_lib.wind_field(config, duration)
  log = engine.simulate(
      config_lib.quad_params(config), config_lib.control_gains(config),
      wind_field, config_lib.waypoint(config),
      duration, dt=config['simulation']['dt'],
      log_rate=config['simulation']['log_rate'], seed=seed,
      integrator=config['simulation']['integrator'],
      initial_state=config_lib.initial_state(config),
      motor_model=config_lib.motor_model(config),
      divergence_bound=config['simulation']['divergence_bound'],
      the_plot=the_plot)
  log.metadata['trajectory'] = config['trajectory']['kind']
  log.metadata['config_hash'] = config_lib.config_hash(config)
  return log


def make_dataset(log, config):
  training = config_lib.train_config(config)
  return estimate.build_sequences(
      log, training.sequence_length, training.stride, training.seed,
      training.validation_fraction, training.autoregressive,
      sample_period=1.0 / config['simulation']['log_rate'])


def write_evaluation(series_list, out_dir, provenance, bin_width=0.1,
                     the_plot=None, prefix=''):
  """Evaluate estimate series over their shared window and write the results.

  Writes `<prefix>report.txt`, `<prefix>report_values.txt` and one
  `<prefix>hist_<method>_<north|east>.csv` per series into `out_dir`.

  Returns:
    a 2-tuple: the list of `metrics.MetricsReport`s and a dict of the paths
    written, keyed by artifact name.
  """
  mask = metrics.evaluation_mask(series_list)
  reports = [metrics.evaluate(series, mask, the_plot) for series in series_list]
  paths = collections.OrderedDict()
  paths['report'] = os.path.join(out_dir, prefix + 'report.txt')
  paths['report_values'] = os.path.join(out_dir, prefix + 'report_values.txt')
  metrics.write_report(reports, paths['report'], provenance)
  metrics.write_report_values(reports, paths['report_values'], provenance)
  for series, report in zip(series_list, reports):
    errors = (np.asarray(series.true) - np.asarray(series.estimates))[mask]
    for axis, axis_name in enumerate(('north', 'east')):
      key = 'hist_{}_{}'.format(series.method, axis_name)
      paths[key] = os.path.join(out_dir, prefix + key + '.csv')
      histogram = metrics.error_histogram(
          errors[:, axis], report.normalized.sigma[axis], bin_width)
      metrics.write_histogram(histogram, paths[key], provenance)
  return reports, paths


def run_case(name, out_dir, scale=1.0, epochs=None, seed=None, the_plot=None,
             base=None):
  """Run case `name` end to end, writing its artifacts into `out_dir`.

  Args:
    name: a key of `CASES`.
    out_dir: output directory; created if missing.
    scale: factor applied to both flight durations, for quick runs.
    epochs: overrides the configured number of training epochs.
    seed: see `case_config`.
    the_plot: optional `Plot` collecting the messages of every stage.
    base: configuration the case is applied to.

  Returns:
    an ordered dict of the paths written, keyed by artifact name.

  Raises:
    KeyError: unknown case.
    ValueError: `scale` is not positive.
    quadsim.SimulationError, estimate.TrainingDivergedError,
        estimate.DatasetError: a stage failed.
  """
  if not scale > 0:
    raise ValueError('scale must be positive; got {}.'.format(scale))
  case = CASES[name]
  config = case_config(name, epochs, seed, base)
  config['simulation']['duration'] = case.train_duration * scale
  config['evaluation']['duration'] = case.test_duration * scale
  config = config_lib.validate(config)
  digest = config_lib.config_hash(config)
  if not os.path.isdir(out_dir):
    os.makedirs(out_dir)
  paths = collections.OrderedDict()

  def path(key, filename):
    paths[key] = os.path.join(out_dir, filename)
    return paths[key]

  with io.open(path('config', 'config.yaml'), 'w', encoding='utf-8',
               newline='\n') as f:
    f.write(six.text_type(config_lib.dump_config(config)))

  train_seed = config['simulation']['seed']
  test_seed = config['evaluation']['seed']
  train_log = fly(config, config['simulation']['duration'], train_seed,
                  the_plot)
  recording.write_trajectory_log(train_log, path('train_log', 'train_log.csv'))
  test_log = fly(config, config['evaluation']['duration'], test_seed, the_plot)
  recording.write_trajectory_log(test_log, path('test_log', 'test_log.csv'))

  dataset = make_dataset(train_log, config)
  estimate.save_dataset(dataset, path('dataset', 'dataset.qwds'))
  training = config_lib.train_config(config)
  model, history = estimate.train(
      dataset, training, the_plot, trajectory=config['trajectory']['kind'],
      extra_metadata={'config_hash': digest, 'case': name,
                      'wind': train_log.metadata.get('wind')})
  model.save(path('model', 'model.qwnn'))
  train_provenance = recording.provenance_line(digest, training.seed,
                                               case=name)
  estimate.write_loss_history(history, path('loss', 'loss.csv'),
                              train_provenance)

  series_list = [estimate.nn_estimate(model, test_log),
                 estimate.wt_estimate(test_log,
                                      config_lib.quad_params(config))]
  test_provenance = recording.provenance_line(digest, test_seed, case=name)
  estimate.write_estimates(series_list, path('estimates', 'estimates.csv'),
                           test_provenance)
  _, written = write_evaluation(
      series_list, out_dir, test_provenance,
      config['evaluation']['histogram_bin_width'], the_plot)
  paths.update(written)
  return paths
