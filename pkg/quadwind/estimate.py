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

"""From trajectory logs to wind estimates.

Two estimators read the same `recording.TrajectoryLog`s:

* the network estimator. `build_sequences` cuts a log into overlapping
  windows of north/east position and roll/pitch (the inputs) paired with the
  north/east wind at each window's last sample (the target); `train` fits an
  `nn.Network` to them; `nn_estimate` slides a one-sample-stride window over a
  new log and predicts the wind at every sample after the first `n - 1`.
* the wind triangle. `wt_estimate` reads the tilt of the vehicle as a
  steady-state airspeed: horizontal thrust `m g tan(tilt)` balances drag
  `C_d(V) V^2`, and the airspeed points the way the thrust vector leans. Wind
  is ground velocity plus airspeed, with ground velocity differenced from the
  logged positions.

Both return an `EstimateSeries`; `write_estimates` stores any number of them
in one CSV, and the `metrics` module compares them.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections

import numpy as np
from scipy import optimize

from quadwind import nn
from quadwind import quadsim
from quadwind import recording

import six


INPUT_FEATURES = ('pn', 'pe', 'phi', 'theta')
PREVIOUS_WIND_FEATURES = ('wn_prev', 'we_prev')
TARGETS = ('wn', 'we')
DATASET_MAGIC = b'QWINDSET'
ESTIMATE_COLUMNS = ('t', 'wn_true', 'we_true', 'wn_est', 'we_est', 'method')
LOSS_COLUMNS = ('epoch', 'train_loss', 'validation_loss')

# Samples fed to the network per inference batch.
_INFERENCE_BATCH = 1024


class DatasetError(ValueError):
  """A log cannot be turned into training windows."""


class TrainingDivergedError(ArithmeticError):
  """The training loss stopped being finite.

  Attributes:
    epoch: the epoch (from 1) in which it happened.
    batch: the batch index within that epoch.
  """

  def __init__(self, epoch, batch, loss):
    self.epoch = epoch
    self.batch = batch
    super(TrainingDivergedError, self).__init__(
        'Training diverged in epoch {}, batch {}: loss is {}. Try a smaller '
        'learning rate or check the dataset for extreme values.'.format(
            epoch, batch, loss))


class TrajectoryMismatchError(ValueError):
  """A model is applied to a trajectory kind it was not trained on."""


class TrainConfig(collections.namedtuple(
    'TrainConfig', ['epochs', 'batch_size', 'learning_rate', 'seed',
                    'sequence_length', 'stride', 'validation_fraction',
                    'patience', 'hidden_sizes', 'dropout', 'candidate',
                    'autoregressive'])):
  """Everything that shapes a training run.

  Defaults: 100 epochs, batches of 10, Adam at 0.001, windows of 10 samples
  taken every 5 samples, 10 % of the windows held out for validation, early
  stopping after 10 epochs without validation improvement, two LSTM layers of
  100 units, 10 % dropout, sigmoid cell candidate, no previous-wind input.
  """
  __slots__ = ()

  def __new__(cls, epochs=100, batch_size=10, learning_rate=0.001, seed=0,
              sequence_length=10, stride=5, validation_fraction=0.1,
              patience=10, hidden_sizes=(100, 100), dropout=0.1,
              candidate='sigmoid', autoregressive=False):
    for name, value in (('epochs', epochs), ('batch_size', batch_size),
                        ('sequence_length', sequence_length),
                        ('stride', stride)):
      if int(value) != value or value < 1:
        raise ValueError('{} must be a positive integer; got {}.'.format(
            name, value))
    if stride > sequence_length:
      raise ValueError('stride ({}) may not exceed sequence_length ({}).'.format(
          stride, sequence_length))
    if not learning_rate > 0:
      raise ValueError('learning_rate must be positive; got {}.'.format(
          learning_rate))
    if not 0.0 <= validation_fraction < 1.0:
      raise ValueError('validation_fraction must lie in [0, 1); got {}.'.format(
          validation_fraction))
    if patience is not None and patience < 1:
      raise ValueError('patience must be positive or None; got {}.'.format(
          patience))
    hidden_sizes = tuple(int(h) for h in hidden_sizes)
    if not hidden_sizes or min(hidden_sizes) < 1:
      raise ValueError('hidden_sizes must list positive layer widths; got '
                       '{}.'.format(hidden_sizes))
    return super(TrainConfig, cls).__new__(
        cls, int(epochs), int(batch_size), float(learning_rate), seed,
        int(sequence_length), int(stride), float(validation_fraction),
        None if patience is None else int(patience), hidden_sizes,
        float(dropout), candidate, bool(autoregressive))

  def as_dict(self):
    values = self._asdict()
    values['hidden_sizes'] = list(self.hidden_sizes)
    return dict(values)


def input_features(autoregressive=False):
  return INPUT_FEATURES + (PREVIOUS_WIND_FEATURES if autoregressive else ())


def log_features(log, autoregressive=False, previous_wind=None):
  """Network input columns for every sample of `log`, shape `(N, F)`.

  With `autoregressive`, two more columns hold the north/east wind one sample
  earlier: `previous_wind` if given (shape `(N, 2)`, already shifted), else
  the logged true wind, with the first sample repeating its own value.
  """
  columns = [log.positions[:, 0], log.positions[:, 1], log.attitudes[:, 0],
             log.attitudes[:, 1]]
  if autoregressive:
    if previous_wind is None:
      previous_wind = np.vstack([log.winds[:1, :2], log.winds[:-1, :2]])
    columns.extend([previous_wind[:, 0], previous_wind[:, 1]])
  return np.column_stack(columns)


### Datasets ###


class SequenceWindow(collections.namedtuple(
    'SequenceWindow', ['inputs', 'target', 'end_time'])):
  """One training example.

  * `inputs`: `(n, F)` raw features, oldest sample first.
  * `target`: `(w_n, w_e)` at the last sample, m/s.
  * `end_time`: time of the last sample, s.
  """
  __slots__ = ()


class Dataset(collections.namedtuple(
    'Dataset', ['inputs', 'targets', 'end_times', 'train_indices',
                'validation_indices', 'normalizer', 'metadata'])):
  """Windows cut from a log, their train/validation split and normalizer.

  * `inputs`: `(N, n, F)` raw features; `targets`: `(N, 2)`;
    `end_times`: `(N,)`.
  * `train_indices`, `validation_indices`: a partition of `range(N)`.
  * `normalizer`: an `nn.Normalizer` over the features and then the targets,
    fitted on the training windows only.
  * `metadata`: dict with the feature names, window geometry, seed and the
    source log's provenance.
  """
  __slots__ = ()

  @property
  def size(self):
    """Number of windows."""
    return len(self.targets)

  @property
  def sequence_length(self):
    return self.inputs.shape[1]

  @property
  def feature_names(self):
    return tuple(self.metadata['features'])

  def window(self, index):
    return SequenceWindow(self.inputs[index], self.targets[index],
                          float(self.end_times[index]))

  @property
  def windows(self):
    return [self.window(k) for k in six.moves.range(self.size)]

  def normalized(self, indices):
    """Normalized `(inputs, targets)` for the windows at `indices`."""
    features = self.normalizer.subset(self.feature_names)
    targets = self.normalizer.subset(TARGETS)
    return (nn.normalize(features, self.inputs[indices]),
            nn.normalize(targets, self.targets[indices]))


def window_starts(length, n, stride):
  """First-sample indices of the windows of a `length`-sample log.

  There are `floor((length - n) / stride) + 1` of them.
  """
  if n < 1 or stride < 1:
    raise ValueError('Window length and stride must be positive; got n={}, '
                     'stride={}.'.format(n, stride))
  if length < n:
    raise DatasetError('A log of {} samples is shorter than one window of '
                       '{}.'.format(length, n))
  return np.arange(0, length - n + 1, stride)


def split_indices(count, validation_fraction, seed):
  """Seeded random partition of `range(count)` into (train, validation)."""
  order = np.random.RandomState(seed).permutation(count)
  held_out = int(round(validation_fraction * count))
  if count > 1:
    held_out = min(held_out, count - 1)
  else:
    held_out = 0
  return np.sort(order[held_out:]), np.sort(order[:held_out])


def build_sequences(log, n=10, stride=5, seed=0, validation_fraction=0.1,
                    autoregressive=False, sample_period=0.1):
  """Cut `log` into training windows.

  Args:
    log: a `recording.TrajectoryLog`.
    n: samples per window.
    stride: samples between window starts.
    seed: seed of the train/validation split.
    validation_fraction: share of windows held out for validation.
    autoregressive: add the previous-wind input columns.
    sample_period: the expected log period, s; None accepts any regular
        period.

  Returns:
    a `Dataset`.

  Raises:
    DatasetError: the log is shorter than a window, is irregularly sampled, or
        has a constant feature on the training windows.
  """
  try:
    log.check_regular(sample_period)
  except ValueError as error:
    raise DatasetError(str(error))
  starts = window_starts(len(log), n, stride)
  features = log_features(log, autoregressive)
  offsets = np.arange(n)
  inputs = features[starts[:, np.newaxis] + offsets]
  ends = starts + n - 1
  targets = log.winds[ends, :2]
  train, validation = split_indices(len(starts), validation_fraction, seed)

  names = input_features(autoregressive)
  try:
    feature_norm = nn.fit_normalizer(inputs[train], names)
    target_norm = nn.fit_normalizer(targets[train], TARGETS)
  except nn.NormalizerError as error:
    raise DatasetError('Cannot normalize the training windows: {}'.format(
        error))
  normalizer = nn.Normalizer(
      names + TARGETS, np.concatenate([feature_norm.mean, target_norm.mean]),
      np.concatenate([feature_norm.scale, target_norm.scale]))
  metadata = {'features': list(names), 'sequence_length': int(n),
              'stride': int(stride), 'split_seed': seed,
              'validation_fraction': float(validation_fraction),
              'source': _json_friendly(log.metadata)}
  return Dataset(inputs, targets, log.times[ends], train, validation,
                 normalizer, metadata)


def _json_friendly(metadata):
  return {str(k): v for k, v in six.iteritems(metadata)
          if isinstance(v, (six.string_types, int, float, bool)) or v is None}


def save_dataset(dataset, path):
  header = {'normalizer': list(dataset.normalizer.names),
            'metadata': dataset.metadata}
  arrays = [('inputs', dataset.inputs), ('targets', dataset.targets),
            ('end_times', dataset.end_times),
            ('train_indices', dataset.train_indices),
            ('validation_indices', dataset.validation_indices),
            ('normalizer.mean', dataset.normalizer.mean),
            ('normalizer.scale', dataset.normalizer.scale)]
  recording.write_container(path, DATASET_MAGIC, header, arrays)


def load_dataset(path):
  """Read a dataset written by `save_dataset`.

  Raises:
    recording.FormatError: and its subclasses, as `recording.read_container`.
  """
  header, arrays = recording.read_container(path, DATASET_MAGIC)
  try:
    normalizer = nn.Normalizer(tuple(header['normalizer']),
                               arrays['normalizer.mean'],
                               arrays['normalizer.scale'])
    return Dataset(arrays['inputs'], arrays['targets'], arrays['end_times'],
                   arrays['train_indices'].astype(np.int64),
                   arrays['validation_indices'].astype(np.int64), normalizer,
                   header['metadata'])
  except KeyError as error:
    raise recording.FormatError('{} is missing dataset field {}.'.format(
        path, error))


### Training ###


class WindModel(collections.namedtuple('WindModel', ['network', 'normalizer'])):
  """A trained network and the normalizer of its inputs and outputs."""
  __slots__ = ()

  @property
  def trajectory(self):
    return self.network.metadata.get('trajectory')

  @property
  def feature_names(self):
    return tuple(self.network.metadata.get('features', INPUT_FEATURES))

  @property
  def sequence_length(self):
    return int(self.network.metadata.get('sequence_length', 10))

  def save(self, path):
    nn.save_model(self.network, self.normalizer, path)

  @classmethod
  def load(cls, path):
    return cls(*nn.load_model(path))


LossRecord = collections.namedtuple(
    'LossRecord', ['epoch', 'train_loss', 'validation_loss'])


def train(dataset, config, the_plot=None, trajectory=None, extra_metadata=None):
  """Fit a network to `dataset`.

  Each epoch shuffles the training windows, takes Adam steps on batches of
  `config.batch_size` with dropout on, then measures the validation loss with
  dropout off. Training stops early after `config.patience` epochs without a
  better validation loss (training loss when nothing is held out); the best
  parameters seen are the ones returned.

  Args:
    dataset: a `Dataset`.
    config: a `TrainConfig`. Its window geometry must match the dataset's.
    the_plot: optional `Plot` receiving one log message per epoch.
    trajectory: trajectory kind (`'hover'`, `'line'`) recorded in the model.
    extra_metadata: more JSON-friendly metadata to store in the model.

  Returns:
    a 2-tuple `(WindModel, history)`, `history` a list of `LossRecord`s in
    normalized units.

  Raises:
    DatasetError: the dataset has no training windows.
    TrainingDivergedError: a batch loss was not finite.
  """
  if len(dataset.train_indices) == 0:
    raise DatasetError('The dataset has no training windows.')
  features = dataset.feature_names
  random_state = np.random.RandomState(config.seed)
  network = nn.Network.create(len(features), config.hidden_sizes,
                              len(TARGETS), config.dropout, config.candidate,
                              seed=random_state.randint(2 ** 31 - 1))
  adam = nn.AdamState.initial(network.params, config.learning_rate)
  train_x, train_y = dataset.normalized(dataset.train_indices)
  has_validation = len(dataset.validation_indices) > 0
  if has_validation:
    validation_x, validation_y = dataset.normalized(dataset.validation_indices)

  history = []
  best_loss, best_params, best_epoch, stale = np.inf, network.params, 0, 0
  for epoch in six.moves.range(1, config.epochs + 1):
    order = random_state.permutation(len(train_y))
    total = 0.0
    for batch, start in enumerate(six.moves.range(0, len(order),
                                                  config.batch_size)):
      chosen = order[start:start + config.batch_size]
      loss, grads = nn.loss_and_gradients(network, train_x[chosen],
                                          train_y[chosen], random_state)
      if not np.isfinite(loss):
        if the_plot is not None:
          the_plot.log('Training diverged in epoch {}.'.format(epoch))
        raise TrainingDivergedError(epoch, batch, loss)
      params, adam = nn.adam_step(network.params, grads, adam)
      network = network.with_params(params)
      total += loss * len(chosen)
    train_loss = total / len(order)
    validation_loss = (_evaluation_loss(network, validation_x, validation_y)
                       if has_validation else np.nan)
    history.append(LossRecord(epoch, train_loss, validation_loss))
    if the_plot is not None:
      the_plot.log('epoch {}: train loss {:.6g}, validation loss {:.6g}'.format(
          epoch, train_loss, validation_loss))

    monitored = validation_loss if has_validation else train_loss
    if monitored < best_loss:
      best_loss, best_params, best_epoch, stale = (monitored, network.params,
                                                   epoch, 0)
    else:
      stale += 1
      if config.patience is not None and stale >= config.patience:
        if the_plot is not None:
          the_plot.log('Stopping early after epoch {}; best epoch was '
                       '{}.'.format(epoch, best_epoch))
        break

  network = network.with_params(best_params)
  network.metadata.update(extra_metadata or {})
  network.metadata.update({
      'trajectory': trajectory,
      'features': list(features),
      'sequence_length': dataset.sequence_length,
      'train_config': config.as_dict(),
      'epochs_run': len(history),
      'best_epoch': best_epoch,
      'dataset': dataset.metadata,
  })
  return WindModel(network, dataset.normalizer), history


def _evaluation_loss(network, inputs, targets):
  predictions = np.concatenate([
      nn.forward(network, inputs[start:start + _INFERENCE_BATCH])
      for start in six.moves.range(0, len(inputs), _INFERENCE_BATCH)])
  return nn.mse_loss(predictions, targets)


def write_loss_history(history, path, provenance):
  rows = [(r.epoch, r.train_loss, r.validation_loss) for r in history]
  recording.write_csv(path, LOSS_COLUMNS, np.array(rows, dtype=np.float64),
                      provenance, formats=['%d', '%.17g', '%.17g'])


### Estimation ###


class EstimateSeries(collections.namedtuple(
    'EstimateSeries', ['times', 'true', 'estimates', 'warmup', 'method'])):
  """Wind estimates aligned with the true wind of a log.

  * `times`: `(N,)`, s.
  * `true`, `estimates`: `(N, 2)` north/east wind, m/s; estimates are NaN
    where `warmup` is set.
  * `warmup`: `(N,)` bools, True for samples without a full input window.
  * `method`: `'nn'` or `'wt'`.
  """
  __slots__ = ()

  @property
  def warmup_count(self):
    return int(np.count_nonzero(self.warmup))


def _check_trajectory(model, log, trajectory, allow_mismatch):
  wanted = trajectory or log.metadata.get('trajectory')
  trained = model.trajectory
  if wanted and trained and wanted != trained and not allow_mismatch:
    raise TrajectoryMismatchError(
        'This model was trained on {!r} trajectories but the log is {!r}; '
        'pass allow_mismatch to use it anyway.'.format(trained, wanted))


def nn_estimate(model, log, trajectory=None, allow_mismatch=False):
  """Network wind estimate at every sample of `log`.

  Uses a window of the model's sequence length ending at each sample (stride
  one). The first `n - 1` samples have no full window; they are marked as
  warm-up and their estimates are NaN. Models with the previous-wind input
  feed back their own previous estimate, starting from the training mean.

  Args:
    model: a `WindModel`.
    log: a `recording.TrajectoryLog`.
    trajectory: the log's trajectory kind; defaults to its metadata.
    allow_mismatch: use the model even if it was trained on another kind.

  Returns:
    an `EstimateSeries` with method `'nn'`.

  Raises:
    TrajectoryMismatchError: see `allow_mismatch`.
    DatasetError: the log is shorter than one window.
    ValueError: the model's inputs do not match the features quadwind logs.
  """
  _check_trajectory(model, log, trajectory, allow_mismatch)
  names = model.feature_names
  autoregressive = names == input_features(True)
  if not autoregressive and names != input_features(False):
    raise ValueError('The model expects features {}; logs provide {}.'.format(
        list(names), list(input_features(True))))
  if model.network.input_size != len(names):
    raise ValueError('The network takes {} inputs but the model lists {} '
                     'features.'.format(model.network.input_size, len(names)))
  n = model.sequence_length
  window_starts(len(log), n, 1)
  feature_norm = model.normalizer.subset(names)
  target_norm = model.normalizer.subset(TARGETS)

  estimates = np.full((len(log), 2), np.nan)
  if autoregressive:
    previous = np.tile(target_norm.mean, (len(log), 1))
    for end in six.moves.range(n - 1, len(log)):
      features = log_features(log.slice(end - n + 1, end + 1), True,
                              previous[end - n + 1:end + 1])
      output = nn.forward(model.network, nn.normalize(feature_norm, features))
      estimates[end] = nn.denormalize(target_norm, output)
      if end + 1 < len(log):
        previous[end + 1] = estimates[end]
  else:
    features = nn.normalize(feature_norm, log_features(log))
    windows = np.lib.stride_tricks.sliding_window_view(
        features, n, axis=0).transpose(0, 2, 1)
    outputs = np.concatenate([
        nn.forward(model.network, windows[start:start + _INFERENCE_BATCH])
        for start in six.moves.range(0, len(windows), _INFERENCE_BATCH)])
    estimates[n - 1:] = nn.denormalize(target_norm, outputs)

  warmup = np.zeros(len(log), dtype=bool)
  warmup[:n - 1] = True
  return EstimateSeries(log.times, log.winds[:, :2], estimates, warmup, 'nn')


def steady_airspeed(tilt, params):
  """Airspeed magnitude (m/s) whose drag balances the thrust at `tilt` (rad).

  Solves `C_d(V) V^2 = m g tan(tilt)` for `V >= 0`.
  """
  demand = params.weight * np.tan(abs(tilt))
  if demand <= 0:
    return 0.0

  def residual(speed):
    return quadsim.drag_coefficient(speed) * speed * speed - demand

  upper = 1.0
  while residual(upper) < 0:
    upper *= 2.0
  return float(optimize.brentq(residual, 0.0, upper, xtol=1e-12))


def wt_estimate(log, params):
  """Wind-triangle estimate at every sample of `log`.

  A single-sample log has no observable ground velocity; its estimate is the
  airspeed read from the tilt alone.

  Returns:
    an `EstimateSeries` with method `'wt'` and no warm-up samples.

  Raises:
    DatasetError: `log` is empty.
  """
  if not len(log):
    raise DatasetError('The wind triangle needs at least one logged sample.')
  if len(log) < 2:
    ground_velocity = np.zeros((len(log), 2))
  else:
    ground_velocity = np.gradient(log.positions[:, :2], log.times, axis=0)
  estimates = np.empty((len(log), 2))
  for k, (phi, theta, psi) in enumerate(log.attitudes):
    axis = quadsim.rotation_matrix((phi, theta, psi))[:, 2]
    lean = np.hypot(axis[0], axis[1])
    tilt = np.arccos(np.clip(np.cos(phi) * np.cos(theta), -1.0, 1.0))
    speed = steady_airspeed(tilt, params)
    airspeed = (speed * axis[:2] / lean if lean > 0 and speed > 0
                else np.zeros(2))
    estimates[k] = ground_velocity[k] + airspeed
  return EstimateSeries(log.times, log.winds[:, :2], estimates,
                        np.zeros(len(log), dtype=bool), 'wt')


def write_estimates(series_list, path, provenance):
  """Write one or more `EstimateSeries` to an estimate CSV, one after another.
  """
  rows = []
  for series in series_list:
    for k in six.moves.range(len(series.times)):
      rows.append((series.times[k], series.true[k, 0], series.true[k, 1],
                   series.estimates[k, 0], series.estimates[k, 1],
                   series.method))
  recording.write_csv(path, ESTIMATE_COLUMNS,
                      np.array(rows, dtype=object).reshape(-1, 6), provenance,
                      formats=['%.17g'] * 5 + ['%s'])


def read_estimates(path):
  """Read an estimate CSV back into `EstimateSeries`, keyed by method.

  Samples with NaN estimates are marked as warm-up.

  Raises:
    recording.FormatError: wrong columns or unreadable numbers.
  """
  table = recording.read_csv(path, numeric=False)
  recording.require_columns(table, ESTIMATE_COLUMNS, path)
  grouped = collections.OrderedDict()
  for row in table.rows:
    grouped.setdefault(row[5], []).append(row[:5])
  series = collections.OrderedDict()
  for method, rows in six.iteritems(grouped):
    try:
      values = np.array(rows, dtype=np.float64)
    except ValueError:
      raise recording.FormatError('{}: non-numeric estimate values.'.format(
          path))
    estimates = values[:, 3:5]
    series[method] = EstimateSeries(values[:, 0], values[:, 1:3], estimates,
                                    np.isnan(estimates).any(axis=1), method)
  return series
