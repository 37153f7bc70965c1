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

"""Run configuration files.

A run configuration is one YAML file. `configs/default.yaml` in this package
is the full template; user files are merged over it key by key, so they only
need the keys they change. Keys that the template does not have are rejected
with a `ConfigError` naming the dotted key, and so are values of the wrong
kind or outside the range the target type accepts.

The accessors at the bottom build the objects the rest of quadwind takes
(`QuadParams`, `ControlGains`, wind fields, `TrainConfig`, ...) from a
validated configuration.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import copy
import hashlib
import json
import numbers
import pkgutil

import numpy as np
import yaml

from quadwind import control
from quadwind import estimate
from quadwind import grid
from quadwind import quadsim
from quadwind import wind
from quadwind.prefab_parts import winds

import six


WIND_KINDS = ('dryden', 'spectral', 'piecewise', 'constant', 'signal', 'grid')
TRAJECTORY_KINDS = ('hover', 'line')
# Keys of `wind.spectral.components`, in NED order.
SPECTRAL_COMPONENTS = ('north', 'east', 'down')

# Lists that may differ in length from the default, and keys that also take
# null.
_ANY_LENGTH = frozenset(['training.hidden_sizes'])
_NULLABLE = frozenset(['training.patience', 'simulation.seed', 'training.seed',
                       'evaluation.seed', 'wind.spectral.wavenumber_range'])


class ConfigError(ValueError):
  """A configuration is invalid.

  Attributes:
    key: dotted path of the offending key, e.g. `'gains.roll_limit'`.
  """

  def __init__(self, key, message):
    self.key = key
    super(ConfigError, self).__init__('{}: {}'.format(key, message))


def default_config():
  """A fresh copy of the default configuration."""
  text = pkgutil.get_data('quadwind', 'configs/default.yaml')
  return yaml.safe_load(text.decode('utf-8'))


def merge(base, overrides, prefix=''):
  """Recursively merge `overrides` into a copy of `base`.

  Raises:
    ConfigError: `overrides` has a key `base` lacks, or a section where
        `base` has a value (or the other way round).
  """
  merged = copy.deepcopy(base)
  for key, value in six.iteritems(overrides or {}):
    path = prefix + str(key)
    if key not in merged:
      raise ConfigError(path, 'unknown key.')
    if isinstance(merged[key], dict):
      if not isinstance(value, dict):
        raise ConfigError(path, 'expected a section of keys, got {!r}.'.format(
            value))
      merged[key] = merge(merged[key], value, path + '.')
    else:
      if isinstance(value, dict):
        raise ConfigError(path, 'expected a value, got a section.')
      merged[key] = value
  return merged


def _check_kinds(template, config, prefix=''):
  for key, default in six.iteritems(template):
    path = prefix + key
    value = config[key]
    if value is None and path in _NULLABLE:
      continue
    if isinstance(default, dict):
      _check_kinds(default, value, path + '.')
    elif isinstance(default, bool):
      if not isinstance(value, bool):
        raise ConfigError(path, 'expected true or false, got {!r}.'.format(
            value))
    elif isinstance(default, numbers.Number):
      if isinstance(value, bool) or not isinstance(value, numbers.Number):
        raise ConfigError(path, 'expected a number, got {!r}.'.format(value))
    elif isinstance(default, list):
      if not isinstance(value, list):
        raise ConfigError(path, 'expected a list, got {!r}.'.format(value))
      if path not in _ANY_LENGTH and len(value) != len(default):
        raise ConfigError(path, 'expected {} values, got {!r}.'.format(
            len(default), value))
    elif isinstance(default, six.string_types):
      if not isinstance(value, six.string_types):
        raise ConfigError(path, 'expected a string, got {!r}.'.format(value))


def validate(config):
  """Check kinds, choices and ranges; returns `config` unchanged.

  Every typed accessor below is run once so that range errors surface here,
  converted to `ConfigError`s.

  Raises:
    ConfigError: anything is wrong.
  """
  template = default_config()
  merge(template, config)
  _check_kinds(template, config)
  if config['wind']['kind'] not in WIND_KINDS:
    raise ConfigError('wind.kind', 'must be one of {}; got {!r}.'.format(
        ', '.join(WIND_KINDS), config['wind']['kind']))
  if config['wind']['spectral']['mode'] not in winds.SpectralWind.MODES:
    raise ConfigError('wind.spectral.mode', 'must be temporal or spatial.')
  if config['trajectory']['kind'] not in TRAJECTORY_KINDS:
    raise ConfigError('trajectory.kind', 'must be hover or line; got '
                      '{!r}.'.format(config['trajectory']['kind']))
  for key in ('duration', 'dt', 'log_rate', 'divergence_bound'):
    if not config['simulation'][key] > 0:
      raise ConfigError('simulation.' + key, 'must be positive.')
  if not config['evaluation']['duration'] > 0:
    raise ConfigError('evaluation.duration', 'must be positive.')
  for section, builder in (('quad', quad_params), ('motor', motor_model),
                           ('gains', control_gains),
                           ('wind.dryden', dryden_params),
                           ('training', train_config)):
    try:
      builder(config)
    except ValueError as error:
      raise ConfigError(section, str(error))
  spectral_params(config)
  try:
    quadsim.get_integrator(config['simulation']['integrator'])
  except ValueError as error:
    raise ConfigError('simulation.integrator', str(error))
  return config


def load_config(path=None, overrides=None):
  """Load and validate a configuration.

  Args:
    path: a YAML file merged over the defaults, or None for the defaults.
    overrides: a nested dict merged last.

  Returns:
    the merged, validated configuration as nested dicts.

  Raises:
    IOError: `path` cannot be read.
    ConfigError: the file is not valid YAML or not a valid configuration.
  """
  config = default_config()
  if path is not None:
    with open(path, 'r') as f:
      try:
        loaded = yaml.safe_load(f)
      except yaml.YAMLError as error:
        raise ConfigError('<file>', 'not valid YAML: {}'.format(error))
    if loaded is not None and not isinstance(loaded, dict):
      raise ConfigError('<file>', 'the top level must be a mapping.')
    config = merge(config, loaded)
  if overrides:
    config = merge(config, overrides)
  return validate(config)


def config_hash(config):
  """First 16 hex digits of the SHA-256 of the canonical JSON form."""
  canonical = json.dumps(config, sort_keys=True, separators=(',', ':'))
  return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


def dump_config(config):
  return yaml.safe_dump(config, default_flow_style=False, sort_keys=True)


### Typed accessors ###


def quad_params(config):
  return quadsim.QuadParams(**config['quad'])


def motor_model(config):
  section = config['motor']
  return quadsim.MotorModel(
      kp=section['kp'], ki=section['ki'], kd=section['kd'],
      pwm_range=(section['pwm_min'], section['pwm_max']),
      max_rate=section['max_rate'])


def control_gains(config):
  return control.ControlGains(**config['gains'])


def dryden_params(config):
  section = config['wind']['dryden']
  return wind.DrydenParams(section['sigma'], section['length_scale'],
                           section['airspeed'], section['update_dt'])


def spectral_params(config):
  """One `wind.SpectralParams` per NED component, from `wind.spectral`.

  Sigma and airspeed are those of `wind.dryden`.

  Raises:
    ConfigError: a component's spectrum is invalid; the key names the
        component (`wind.spectral.components.east`) or the shared
        `wind.spectral.wavenumber_range`.
  """
  section = config['wind']['spectral']
  dryden = config['wind']['dryden']
  span = section['wavenumber_range']
  if span is not None and not (
      all(isinstance(x, numbers.Number) for x in span) and
      0 <= span[0] < span[1]):
    raise ConfigError('wind.spectral.wavenumber_range',
                      'must satisfy 0 <= low < high; got {!r}.'.format(span))
  params = []
  for axis, name in enumerate(SPECTRAL_COMPONENTS):
    shape = section['components'][name]
    try:
      params.append(wind.SpectralParams(
          dryden['sigma'][axis], shape['length_scale'], a=shape['a'],
          b=shape['b'], c=shape['c'], bins=section['bins'],
          wavenumber_range=span, airspeed=dryden['airspeed']))
    except ValueError as error:
      raise ConfigError('wind.spectral.components.' + name, str(error))
  return tuple(params)


def train_config(config):
  return estimate.TrainConfig(**config['training'])


def waypoint(config):
  """The NED waypoint of the configured trajectory."""
  trajectory = config['trajectory']
  altitude = float(trajectory['altitude'])
  if trajectory['kind'] == 'line':
    return np.array([float(trajectory['line_distance']), 0.0, -altitude])
  return np.array([0.0, 0.0, -altitude])


def initial_state(config):
  """At rest, level, at the configured altitude above the origin."""
  return quadsim.QuadState.at_rest((0.0, 0.0, -config['trajectory']['altitude']))


def wind_field(config, duration=None, signal_path=None, grid_path=None):
  """The configured `wind.WindField`.

  Args:
    config: a validated configuration.
    duration: length of piecewise-constant schedules; default the
        simulation duration.
    signal_path: overrides `wind.signal_path` (and selects the signal kind).
    grid_path: overrides `wind.grid_path` (and selects the grid kind).

  Raises:
    ConfigError: a file-backed kind has no file.
  """
  section = config['wind']
  kind = section['kind']
  if signal_path is not None:
    kind = 'signal'
  elif grid_path is not None:
    kind = 'grid'
  mean = section['mean']
  if kind == 'constant':
    return winds.ConstantWind(mean)
  if kind == 'piecewise':
    piecewise = section['piecewise']
    return winds.PiecewiseConstantWind(
        duration or config['simulation']['duration'],
        piecewise['amplitude_range'], piecewise['interval_range'], mean)
  if kind == 'dryden':
    return winds.DrydenWind(mean, dryden_params(config),
                            section['dryden']['spinup'])
  if kind == 'spectral':
    return winds.SpectralWind(spectral_params(config), mean,
                              section['spectral']['mode'])
  if kind == 'signal':
    path = signal_path or section['signal_path']
    if not path:
      raise ConfigError('wind.signal_path', 'the signal wind needs a file.')
    return winds.SignalWind.from_csv(path)
  path = grid_path or section['grid_path']
  if not path:
    raise ConfigError('wind.grid_path', 'the grid wind needs a file.')
  return winds.GridWind(grid.load_grid_wind(path))
