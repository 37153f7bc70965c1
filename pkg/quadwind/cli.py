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

"""The `quadwind` command.

    quadwind gen-wind      --config C --out W.csv [--kind signal|grid]
    quadwind simulate      --config C --out LOG.csv [--wind-signal W.csv]
    quadwind build-dataset LOG.csv --config C --out D.qwds
    quadwind train         D.qwds --config C --out M.qwnn [--loss-out L.csv]
    quadwind estimate      LOG.csv --method nn --model M.qwnn --out E.csv
    quadwind evaluate      E.csv [E2.csv ...] --out-dir DIR
    quadwind repro         hover-piecewise --out-dir DIR [--scale 0.1]

Every command takes `--config` (default: the packaged defaults) and stamps
each file it writes with the config hash and seed. Messages from the run are
printed to stderr as they arrive. Exit status: 0 on success, 1 for usage
errors and missing files, 2 for invalid configurations, 3 when a simulation,
training run or evaluation fails.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import argparse
import collections
import os
import sys

import numpy as np

from quadwind import cases
from quadwind import config as config_lib
from quadwind import estimate
from quadwind import grid
from quadwind import metrics
from quadwind import nn
from quadwind import plot
from quadwind import quadsim
from quadwind import recording
from quadwind.prefab_parts import winds
from quadwind.protocols import logging as qw_logging

import six


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# Failures of a well-formed request. `ConfigError` is caught before these.
_RUNTIME_ERRORS = (quadsim.SimulationError, ArithmeticError,
                   recording.FormatError, grid.GridFormatError,
                   estimate.DatasetError, estimate.TrajectoryMismatchError,
                   metrics.CovarianceError, nn.NormalizerError, ValueError)


class UsageError(Exception):
  """The command line asks for something impossible."""


class _ArgumentParser(argparse.ArgumentParser):
  """Raises `UsageError` instead of exiting with status 2."""

  def error(self, message):
    raise UsageError('{}: {}'.format(self.prog, message))


class _ConsolePlot(plot.Plot):
  """A `Plot` that prints messages to a stream as soon as they are logged."""

  def __init__(self, command, stream):
    super(_ConsolePlot, self).__init__()
    self._command = command
    self._stream = stream

  def log(self, message):
    super(_ConsolePlot, self).log(message)
    self.flush()

  def flush(self):
    for message in qw_logging.consume(self):
      print('quadwind {}: {}'.format(self._command, message),
            file=self._stream)


def _load_config(args):
  return config_lib.load_config(args.config)


def _require_file(path):
  if not os.path.isfile(path):
    raise IOError(2, 'No such file', path)


def _seed(args, config, section='simulation'):
  return args.seed if args.seed is not None else config[section]['seed']


### Commands ###


def gen_wind(args, config, the_plot):
  """Write the configured wind as a signal CSV or a grid file."""
  seed = _seed(args, config)
  duration = args.duration or config['simulation']['duration']
  wind_field = config_lib.wind_field(config, duration)
  wind_field.prepare(config['simulation']['dt'], the_plot)
  wind_field.reset(seed)
  provenance = recording.provenance_line(config_lib.config_hash(config), seed,
                                         wind=wind_field.describe()['kind'])
  if args.kind == 'grid':
    layout = config['wind']['grid']
    field = grid.grid_from_field(wind_field, layout['dims'],
                                 layout['spacings'], layout['origin'])
    grid.save_grid_wind(field, args.out)
    the_plot.log('wrote a {} grid to {}.'.format(
        'x'.join(str(d) for d in field.dims), args.out))
    return
  if not args.rate > 0:
    raise UsageError('--rate must be positive; got {}.'.format(args.rate))
  times = np.arange(int(round(duration * args.rate)) + 1) / args.rate
  position = config_lib.initial_state(config).position
  values = np.array([wind_field.sample(position, t) for t in times])
  recording.write_csv(args.out, winds.SIGNAL_COLUMNS,
                      np.column_stack([times, values]), provenance)
  the_plot.log('wrote {} wind samples to {}.'.format(len(times), args.out))


def simulate(args, config, the_plot):
  """Fly the configured trajectory and write its log."""
  seed = _seed(args, config)
  duration = args.duration or config['simulation']['duration']
  wind_field = None
  if args.wind_signal or args.wind_grid:
    for path in (args.wind_signal, args.wind_grid):
      if path:
        _require_file(path)
    wind_field = config_lib.wind_field(config, duration, args.wind_signal,
                                       args.wind_grid)
  log = cases.fly(config, duration, seed, the_plot, wind_field)
  recording.write_trajectory_log(log, args.out)
  the_plot.log('logged {} samples over {:g} s.'.format(len(log), duration))


def build_dataset(args, config, the_plot):
  """Cut a trajectory log into training windows."""
  _require_file(args.log)
  log = recording.read_trajectory_log(args.log)
  dataset = cases.make_dataset(log, config)
  estimate.save_dataset(dataset, args.out)
  the_plot.log('{} windows: {} for training, {} for validation.'.format(
      dataset.size, len(dataset.train_indices),
      len(dataset.validation_indices)))


def train(args, config, the_plot):
  """Train a network on a dataset."""
  _require_file(args.dataset)
  dataset = estimate.load_dataset(args.dataset)
  training = config_lib.train_config(config)
  if args.epochs is not None:
    training = training._replace(epochs=args.epochs)
  if training.sequence_length != dataset.sequence_length:
    raise config_lib.ConfigError(
        'training.sequence_length', 'is {} but the dataset has windows of '
        '{}.'.format(training.sequence_length, dataset.sequence_length))
  source = dataset.metadata.get('source', {})
  trajectory = source.get('trajectory') or config['trajectory']['kind']
  digest = config_lib.config_hash(config)
  model, history = estimate.train(
      dataset, training, the_plot, trajectory=trajectory,
      extra_metadata={'config_hash': digest, 'wind': source.get('wind')})
  model.save(args.out)
  if args.loss_out:
    estimate.write_loss_history(
        history, args.loss_out,
        recording.provenance_line(digest, training.seed))


def run_estimate(args, config, the_plot):
  """Estimate the wind along a logged flight."""
  _require_file(args.log)
  log = recording.read_trajectory_log(args.log)
  if args.method == 'nn':
    if not args.model:
      raise UsageError('--method nn needs --model.')
    _require_file(args.model)
    model = estimate.WindModel.load(args.model)
    series = estimate.nn_estimate(model, log, allow_mismatch=args.allow_mismatch)
  else:
    series = estimate.wt_estimate(log, config_lib.quad_params(config))
  estimate.write_estimates(
      [series], args.out,
      recording.provenance_line(config_lib.config_hash(config),
                                log.metadata.get('seed'), method=args.method))
  the_plot.log('{} estimates, {} warm-up samples.'.format(
      len(series.times), series.warmup_count))


def evaluate(args, config, the_plot):
  """Compare estimate series with the true wind and write the report."""
  series = collections.OrderedDict()
  for path in args.estimates:
    _require_file(path)
    for method, one in six.iteritems(estimate.read_estimates(path)):
      if method in series:
        raise UsageError('{}: method {!r} appears in more than one '
                         'estimate file.'.format(path, method))
      series[method] = one
  if not os.path.isdir(args.out_dir):
    os.makedirs(args.out_dir)
  provenance = recording.provenance_line(
      config_lib.config_hash(config), _seed(args, config, 'evaluation'))
  reports, _ = cases.write_evaluation(
      list(series.values()), args.out_dir, provenance,
      config['evaluation']['histogram_bin_width'], the_plot, args.prefix)
  for line in metrics.format_report_table(reports).splitlines():
    the_plot.log(line)


def repro(args, config, the_plot):
  """Run a named case end to end."""
  if args.case not in cases.CASES:
    raise UsageError('unknown case {!r}; choose from {}.'.format(
        args.case, ', '.join(cases.CASES)))
  if not args.scale > 0:
    raise UsageError('--scale must be positive; got {}.'.format(args.scale))
  paths = cases.run_case(args.case, args.out_dir, args.scale, args.epochs,
                         args.seed, the_plot, config)
  for name, path in six.iteritems(paths):
    the_plot.log('{}: {}'.format(name, path))


### Argument parsing ###


def make_parser():
  parser = _ArgumentParser(
      prog='quadwind',
      description='Quadcopter wind estimation: simulate flights, train an '
      'LSTM wind estimator, compare it with the wind triangle.')
  subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
  subparsers.required = True

  def command(name, function, help_text):
    sub = subparsers.add_parser(name, help=help_text,
                                description=function.__doc__)
    sub.set_defaults(function=function)
    sub.add_argument('--config', metavar='PATH', default=None,
                     help='YAML run configuration (default: built-in).')
    return sub

  sub = command('gen-wind', gen_wind, 'write a wind signal or grid file')
  sub.add_argument('--out', required=True, metavar='PATH')
  sub.add_argument('--kind', choices=('signal', 'grid'), default='signal')
  sub.add_argument('--rate', type=float, default=100.0,
                   help='signal samples per second')
  sub.add_argument('--duration', type=float, default=None)
  sub.add_argument('--seed', type=int, default=None)

  sub = command('simulate', simulate, 'fly and write a trajectory log')
  sub.add_argument('--out', required=True, metavar='PATH')
  sub.add_argument('--wind-signal', metavar='PATH', default=None,
                   help='play back a wind CSV from gen-wind')
  sub.add_argument('--wind-grid', metavar='PATH', default=None,
                   help='fly through a gridded wind file')
  sub.add_argument('--duration', type=float, default=None)
  sub.add_argument('--seed', type=int, default=None)

  sub = command('build-dataset', build_dataset, 'window a trajectory log')
  sub.add_argument('log', metavar='LOG')
  sub.add_argument('--out', required=True, metavar='PATH')

  sub = command('train', train, 'train a wind network')
  sub.add_argument('dataset', metavar='DATASET')
  sub.add_argument('--out', required=True, metavar='PATH')
  sub.add_argument('--loss-out', metavar='PATH', default=None)
  sub.add_argument('--epochs', type=int, default=None)

  sub = command('estimate', run_estimate, 'estimate the wind along a log')
  sub.add_argument('log', metavar='LOG')
  sub.add_argument('--out', required=True, metavar='PATH')
  sub.add_argument('--method', choices=('nn', 'wt'), default='nn')
  sub.add_argument('--model', metavar='PATH', default=None)
  sub.add_argument('--allow-mismatch', action='store_true',
                   help='use a model trained on another trajectory kind')

  sub = command('evaluate', evaluate, 'write metrics and histograms')
  sub.add_argument('estimates', nargs='+', metavar='ESTIMATES')
  sub.add_argument('--out-dir', required=True, metavar='DIR')
  sub.add_argument('--prefix', default='')
  sub.add_argument('--seed', type=int, default=None)

  sub = command('repro', repro, 'run a named case end to end')
  sub.add_argument('case', metavar='CASE',
                   help='one of: ' + ', '.join(cases.CASES))
  sub.add_argument('--out-dir', required=True, metavar='DIR')
  sub.add_argument('--scale', type=float, default=1.0,
                   help='factor applied to the flight durations')
  sub.add_argument('--epochs', type=int, default=None)
  sub.add_argument('--seed', type=int, default=None)
  return parser


def main(argv=None, stderr=None):
  """Run the `quadwind` command; returns the exit status."""
  stderr = stderr or sys.stderr
  argv = sys.argv[1:] if argv is None else list(argv)
  try:
    args = make_parser().parse_args(argv)
  except UsageError as error:
    print(error, file=stderr)
    return EXIT_USAGE

  the_plot = _ConsolePlot(args.command, stderr)
  prefix = 'quadwind {}: '.format(args.command)
  try:
    if args.config is not None:
      _require_file(args.config)
    config = _load_config(args)
    args.function(args, config, the_plot)
  except UsageError as error:
    status, text = EXIT_USAGE, str(error)
  except (IOError, OSError) as error:
    status = EXIT_USAGE
    text = '{}: {}'.format(error.filename or '', error.strerror or error)
  except config_lib.ConfigError as error:
    status, text = EXIT_CONFIG, 'invalid configuration: {}'.format(error)
  except _RUNTIME_ERRORS as error:
    status, text = EXIT_RUNTIME, '{}: {}'.format(type(error).__name__, error)
  else:
    status, text = EXIT_OK, None
  the_plot.flush()
  if text is not None:
    print(prefix + text, file=stderr)
  return status


if __name__ == '__main__':
  sys.exit(main())
