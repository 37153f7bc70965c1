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

"""A small LSTM regression network, written out in numpy.

The network is a stack of LSTM layers followed by a linear head that reads the
last hidden state. Each LSTM step computes

    i = sigmoid(b_i + U_i x + W_i h_prev)
    f = sigmoid(b_f + U_f x + W_f h_prev)
    o = sigmoid(b_o + U_o x + W_o h_prev)
    g = sigmoid(b_g + U_g x + W_g h_prev)      (tanh with candidate='tanh')
    c = f c_prev + i g
    h = o tanh(c)

Weights of the four gates are stacked along the last axis in the order
`i, f, o, g`: input weights are `(D, 4H)`, recurrent weights `(H, 4H)` and
biases `(4H,)`. Everything is float64 and works on batches `(B, n, D)` of
sequences.

Training uses inverted dropout (masks scaled by `1 / (1 - p)`) on the outputs
of every LSTM layer feeding another layer, at every time step, and on the
final hidden state feeding the head. Evaluation applies no dropout.
Gradients come from backpropagation through time (`backward`) and parameters
move with Adam (`adam_step`).

Models are saved in a `recording` container together with the `Normalizer`
that maps raw features to the network's inputs and outputs.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections
import copy

import numpy as np
from scipy import special

from quadwind import recording

import six


MODEL_MAGIC = b'QWINDNET'
CANDIDATE_ACTIVATIONS = ('sigmoid', 'tanh')


class NormalizerError(ValueError):
  """A feature cannot be normalized, e.g. because it never varies.

  Attributes:
    feature: name of the offending feature.
  """

  def __init__(self, feature, message):
    self.feature = feature
    super(NormalizerError, self).__init__(message)


### Layers and networks ###


class LstmLayer(collections.namedtuple(
    'LstmLayer', ['input_weights', 'recurrent_weights', 'bias'])):
  """Parameters of one LSTM layer, gates stacked in the order i, f, o, g."""
  __slots__ = ()

  @property
  def input_size(self):
    return self.input_weights.shape[0]

  @property
  def hidden_size(self):
    return self.recurrent_weights.shape[0]

  @classmethod
  def initialize(cls, input_size, hidden_size, random_state):
    """Uniform weights in +/- 1/sqrt(fan_in); forget-gate bias 1, others 0."""
    input_limit = 1.0 / np.sqrt(input_size)
    recurrent_limit = 1.0 / np.sqrt(hidden_size)
    input_weights = random_state.uniform(-input_limit, input_limit,
                                         (input_size, 4 * hidden_size))
    recurrent_weights = random_state.uniform(
        -recurrent_limit, recurrent_limit, (hidden_size, 4 * hidden_size))
    bias = np.zeros(4 * hidden_size)
    bias[hidden_size:2 * hidden_size] = 1.0
    return cls(input_weights, recurrent_weights, bias)


class Dense(collections.namedtuple('Dense', ['weights', 'bias'])):
  """A linear layer `y = h W + b`."""
  __slots__ = ()


def sigmoid(x):
  return special.expit(x)


def _candidate(z, candidate):
  return sigmoid(z) if candidate == 'sigmoid' else np.tanh(z)


def lstm_cell_step(layer, x_k, h_prev, c_prev, candidate='sigmoid'):
  """One LSTM step.

  Args:
    layer: an `LstmLayer`.
    x_k: input, shape `(D,)` or `(B, D)`.
    h_prev: previous hidden state, `(H,)` or `(B, H)`.
    c_prev: previous cell state, `(H,)` or `(B, H)`.
    candidate: activation of the candidate cell value, `'sigmoid'` or
        `'tanh'`.

  Returns:
    a 2-tuple `(h_k, c_k)`.
  """
  gates = _gates(layer, x_k, h_prev, candidate)
  i, f, o, g = gates
  c_k = f * c_prev + i * g
  return o * np.tanh(c_k), c_k


def _gates(layer, x, h_prev, candidate):
  hidden = layer.hidden_size
  z = layer.bias + np.dot(x, layer.input_weights) + np.dot(
      h_prev, layer.recurrent_weights)
  i = sigmoid(z[..., :hidden])
  f = sigmoid(z[..., hidden:2 * hidden])
  o = sigmoid(z[..., 2 * hidden:3 * hidden])
  g = _candidate(z[..., 3 * hidden:], candidate)
  return i, f, o, g


class Network(object):
  """Stacked LSTM layers and a linear head.

  Parameters live in the ordered dict `params` under the names
  `lstm<k>.U`, `lstm<k>.W`, `lstm<k>.b` (k counted from 1), `dense.W` and
  `dense.b`. Optimizers replace the dict wholesale through `with_params`.
  `metadata` is a free-form, JSON-friendly dict that is saved with the model.
  """

  def __init__(self, params, dropout=0.1, candidate='sigmoid', metadata=None):
    if not 0.0 <= dropout < 1.0:
      raise ValueError('dropout must lie in [0, 1); got {}.'.format(dropout))
    if candidate not in CANDIDATE_ACTIVATIONS:
      raise ValueError('candidate must be one of {}; got {!r}.'.format(
          CANDIDATE_ACTIVATIONS, candidate))
    self._params = collections.OrderedDict(
        (name, np.asarray(value, dtype=np.float64))
        for name, value in six.iteritems(params))
    self._layer_count = sum(1 for name in self._params
                            if name.endswith('.U'))
    if self._layer_count < 1 or 'dense.W' not in self._params:
      raise ValueError('A Network needs at least one LSTM layer and a dense '
                       'head; got parameters {}.'.format(list(self._params)))
    previous = self.layer(1).input_size
    for index in six.moves.range(1, self._layer_count + 1):
      layer = self.layer(index)
      hidden = layer.hidden_size
      if (layer.input_size != previous or
          layer.recurrent_weights.shape != (hidden, 4 * hidden) or
          layer.bias.shape != (4 * hidden,)):
        raise ValueError('LSTM layer {} has inconsistent shapes.'.format(index))
      previous = hidden
    if self.head.weights.shape[0] != previous:
      raise ValueError('The dense head expects {} inputs; the last LSTM layer '
                       'has {} units.'.format(self.head.weights.shape[0],
                                              previous))
    self.dropout = float(dropout)
    self.candidate = candidate
    self.metadata = dict(metadata or {})

  @classmethod
  def create(cls, input_size, hidden_sizes=(100, 100), output_size=2,
             dropout=0.1, candidate='sigmoid', seed=None):
    """A freshly initialized network; `seed` fixes the initialization."""
    random_state = np.random.RandomState(seed)
    params = collections.OrderedDict()
    previous = input_size
    for index, hidden in enumerate(hidden_sizes, 1):
      layer = LstmLayer.initialize(previous, hidden, random_state)
      params['lstm{}.U'.format(index)] = layer.input_weights
      params['lstm{}.W'.format(index)] = layer.recurrent_weights
      params['lstm{}.b'.format(index)] = layer.bias
      previous = hidden
    limit = 1.0 / np.sqrt(previous)
    params['dense.W'] = random_state.uniform(-limit, limit,
                                             (previous, output_size))
    params['dense.b'] = np.zeros(output_size)
    return cls(params, dropout, candidate)

  @property
  def params(self):
    return self._params

  @property
  def layer_count(self):
    return self._layer_count

  @property
  def input_size(self):
    return self.layer(1).input_size

  @property
  def output_size(self):
    return self.head.weights.shape[1]

  @property
  def hidden_sizes(self):
    return tuple(self.layer(k).hidden_size
                 for k in six.moves.range(1, self._layer_count + 1))

  def layer(self, index):
    """The `LstmLayer` at position `index`, counted from 1."""
    prefix = 'lstm{}.'.format(index)
    return LstmLayer(self._params[prefix + 'U'], self._params[prefix + 'W'],
                     self._params[prefix + 'b'])

  @property
  def head(self):
    return Dense(self._params['dense.W'], self._params['dense.b'])

  def with_params(self, params):
    """A network with the same architecture and metadata and new `params`."""
    return Network(params, self.dropout, self.candidate,
                   copy.deepcopy(self.metadata))

  def architecture(self):
    return {'input_size': self.input_size,
            'hidden_sizes': list(self.hidden_sizes),
            'output_size': self.output_size,
            'dropout': self.dropout,
            'candidate': self.candidate}


### Forward and backward passes ###


class ForwardCache(collections.namedtuple(
    'ForwardCache', ['inputs', 'layers', 'masks', 'final_mask', 'final_hidden'])):
  """Activations kept by a train-mode `forward` for `backward`.

  * `inputs`: the network input, `(B, n, D)`.
  * `layers`: per LSTM layer, a dict of stacked per-step activations.
  * `masks`: per non-final LSTM layer, its dropout mask `(B, n, H)` or None.
  * `final_mask`: dropout mask on the last hidden state, or None.
  * `final_hidden`: the (masked) last hidden state fed to the head.
  """
  __slots__ = ()


def _as_batch(sequence, input_size):
  sequence = np.asarray(sequence, dtype=np.float64)
  if sequence.ndim == 2:
    sequence = sequence[np.newaxis]
  if sequence.ndim != 3 or sequence.shape[1] < 1:
    raise ValueError('Sequences must have shape (n, D) or (B, n, D) with '
                     'n >= 1; got {}.'.format(sequence.shape))
  if sequence.shape[2] != input_size:
    raise ValueError('The network takes {} input features; got {}.'.format(
        input_size, sequence.shape[2]))
  return sequence


def _layer_forward(layer, inputs, candidate):
  batch, steps, _ = inputs.shape
  hidden = layer.hidden_size
  h = np.zeros((batch, hidden))
  c = np.zeros((batch, hidden))
  record = {name: np.empty((batch, steps, hidden))
            for name in ('i', 'f', 'o', 'g', 'c', 'h', 'c_prev', 'h_prev')}
  for k in six.moves.range(steps):
    i, f, o, g = _gates(layer, inputs[:, k], h, candidate)
    record['c_prev'][:, k] = c
    record['h_prev'][:, k] = h
    c = f * c + i * g
    h = o * np.tanh(c)
    for name, value in (('i', i), ('f', f), ('o', o), ('g', g), ('c', c),
                        ('h', h)):
      record[name][:, k] = value
  record['x'] = inputs
  return record


def _dropout_mask(shape, rate, random_state):
  return (random_state.uniform(size=shape) >= rate) / (1.0 - rate)


def forward(network, sequence, mode='eval', random_state=None):
  """Run the network over one sequence or a batch of them.

  Args:
    network: a `Network`.
    sequence: normalized inputs, `(n, D)` or `(B, n, D)`.
    mode: `'eval'` (no dropout) or `'train'` (dropout, cache for `backward`).
    random_state: `np.random.RandomState` for the dropout masks; required in
        train mode when the network's dropout rate is positive.

  Returns:
    in eval mode, the predictions, `(O,)` for one sequence or `(B, O)` for a
    batch; in train mode, a 2-tuple `(predictions, ForwardCache)` with batched
    predictions.

  Raises:
    ValueError: on a bad mode or input shape, or a missing `random_state`.
  """
  if mode not in ('eval', 'train'):
    raise ValueError("mode must be 'eval' or 'train'; got {!r}.".format(mode))
  single = np.ndim(sequence) == 2
  inputs = _as_batch(sequence, network.input_size)
  use_dropout = mode == 'train' and network.dropout > 0
  if use_dropout and random_state is None:
    raise ValueError('Train-mode forward passes with dropout need a '
                     'random_state.')

  layers, masks = [], []
  layer_input = inputs
  for index in six.moves.range(1, network.layer_count + 1):
    record = _layer_forward(network.layer(index), layer_input,
                            network.candidate)
    layers.append(record)
    output = record['h']
    if index < network.layer_count:
      mask = (_dropout_mask(output.shape, network.dropout, random_state)
              if use_dropout else None)
      masks.append(mask)
      layer_input = output if mask is None else output * mask
  final = layers[-1]['h'][:, -1]
  final_mask = (_dropout_mask(final.shape, network.dropout, random_state)
                if use_dropout else None)
  if final_mask is not None:
    final = final * final_mask
  head = network.head
  predictions = np.dot(final, head.weights) + head.bias

  if mode == 'train':
    return predictions, ForwardCache(inputs, layers, masks, final_mask, final)
  return predictions[0] if single else predictions


def mse_loss(pred, target):
  """Mean of the squared component errors."""
  difference = np.asarray(pred, dtype=np.float64) - np.asarray(
      target, dtype=np.float64)
  return float(np.mean(difference * difference))


def mse_loss_gradient(pred, target):
  """Gradient of `mse_loss` with respect to `pred`."""
  pred = np.asarray(pred, dtype=np.float64)
  return 2.0 * (pred - np.asarray(target, dtype=np.float64)) / pred.size


def _layer_backward(layer, record, d_hidden, candidate):
  """BPTT through one layer; returns parameter gradients and input gradient."""
  batch, steps, hidden = d_hidden.shape
  d_input_weights = np.zeros_like(layer.input_weights)
  d_recurrent_weights = np.zeros_like(layer.recurrent_weights)
  d_bias = np.zeros_like(layer.bias)
  d_inputs = np.zeros_like(record['x'])
  dh_next = np.zeros((batch, hidden))
  dc_next = np.zeros((batch, hidden))
  for k in reversed(six.moves.range(steps)):
    i, f, o, g = (record[name][:, k] for name in 'ifog')
    tanh_c = np.tanh(record['c'][:, k])
    dh = d_hidden[:, k] + dh_next
    do = dh * tanh_c
    dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_next
    di = dc * g
    dg = dc * i
    df = dc * record['c_prev'][:, k]
    dc_next = dc * f
    if candidate == 'sigmoid':
      dz_g = dg * g * (1.0 - g)
    else:
      dz_g = dg * (1.0 - g * g)
    dz = np.concatenate([di * i * (1.0 - i), df * f * (1.0 - f),
                         do * o * (1.0 - o), dz_g], axis=1)
    d_input_weights += np.dot(record['x'][:, k].T, dz)
    d_recurrent_weights += np.dot(record['h_prev'][:, k].T, dz)
    d_bias += dz.sum(axis=0)
    d_inputs[:, k] = np.dot(dz, layer.input_weights.T)
    dh_next = np.dot(dz, layer.recurrent_weights.T)
  return (d_input_weights, d_recurrent_weights, d_bias), d_inputs


def backward(network, cache, d_predictions):
  """Gradients of a loss with respect to every network parameter.

  Args:
    network: the `Network` that produced `cache`.
    cache: the `ForwardCache` of a train-mode `forward`.
    d_predictions: gradient of the loss with respect to the batched
        predictions, `(B, O)`.

  Returns:
    an `OrderedDict` of gradients keyed and shaped like `network.params`.
  """
  d_predictions = np.asarray(d_predictions, dtype=np.float64).reshape(
      cache.final_hidden.shape[0], network.output_size)
  grads = collections.OrderedDict()
  head = network.head
  d_final = np.dot(d_predictions, head.weights.T)
  if cache.final_mask is not None:
    d_final = d_final * cache.final_mask

  last = cache.layers[-1]
  d_hidden = np.zeros_like(last['h'])
  d_hidden[:, -1] = d_final
  for index in six.moves.range(network.layer_count, 0, -1):
    record = cache.layers[index - 1]
    layer_grads, d_inputs = _layer_backward(network.layer(index), record,
                                            d_hidden, network.candidate)
    for suffix, grad in zip(('U', 'W', 'b'), layer_grads):
      grads['lstm{}.{}'.format(index, suffix)] = grad
    if index > 1:
      mask = cache.masks[index - 2]
      d_hidden = d_inputs if mask is None else d_inputs * mask

  grads['dense.W'] = np.dot(cache.final_hidden.T, d_predictions)
  grads['dense.b'] = d_predictions.sum(axis=0)
  return collections.OrderedDict((name, grads[name])
                                 for name in network.params)


def loss_and_gradients(network, sequences, targets, random_state=None):
  """MSE loss of a batch and its gradients, with train-mode dropout."""
  predictions, cache = forward(network, sequences, 'train', random_state)
  targets = np.asarray(targets, dtype=np.float64).reshape(predictions.shape)
  loss = mse_loss(predictions, targets)
  grads = backward(network, cache, mse_loss_gradient(predictions, targets))
  return loss, grads


def gradient_check(network, sequences, targets, step=1e-5):
  """Largest relative error between BPTT and central-difference gradients.

  Dropout is switched off for the check. The relative error of an entry is
  `|a - n| / max(|a| + |n|, 1e-12)`.
  """
  plain = Network(collections.OrderedDict(
      (name, value.copy()) for name, value in six.iteritems(network.params)),
                  0.0, network.candidate)
  _, analytic = loss_and_gradients(plain, sequences, targets)
  worst = 0.0
  for name, value in six.iteritems(plain.params):
    flat = value.reshape(-1)
    grad = analytic[name].reshape(-1)
    for index in six.moves.range(flat.size):
      original = flat[index]
      flat[index] = original + step
      upper = mse_loss(forward(plain, sequences), targets)
      flat[index] = original - step
      lower = mse_loss(forward(plain, sequences), targets)
      flat[index] = original
      numeric = (upper - lower) / (2.0 * step)
      error = abs(grad[index] - numeric) / max(
          abs(grad[index]) + abs(numeric), 1e-12)
      worst = max(worst, error)
  return worst


### Adam ###


class AdamState(collections.namedtuple(
    'AdamState', ['first_moment', 'second_moment', 'step', 'learning_rate',
                  'beta1', 'beta2', 'epsilon'])):
  """Moment accumulators (dicts keyed like the parameters) and settings."""
  __slots__ = ()

  @classmethod
  def initial(cls, params, learning_rate=0.001, beta1=0.9, beta2=0.999,
              epsilon=1e-8):
    if not learning_rate > 0:
      raise ValueError('learning_rate must be positive; got {}.'.format(
          learning_rate))
    zeros = collections.OrderedDict(
        (name, np.zeros_like(value)) for name, value in six.iteritems(params))
    return cls(zeros, copy.deepcopy(zeros), 0, float(learning_rate),
               float(beta1), float(beta2), float(epsilon))


def adam_step(params, grads, state):
  """One bias-corrected Adam update.

  Returns:
    a 2-tuple `(new_params, new_state)`; the inputs are not modified.

  Raises:
    ValueError: gradient and parameter names or shapes differ.
  """
  if list(params) != list(grads):
    raise ValueError('Gradients are keyed {}, parameters {}.'.format(
        list(grads), list(params)))
  step = state.step + 1
  first, second = collections.OrderedDict(), collections.OrderedDict()
  updated = collections.OrderedDict()
  first_correction = 1.0 - state.beta1 ** step
  second_correction = 1.0 - state.beta2 ** step
  for name, value in six.iteritems(params):
    grad = grads[name]
    if grad.shape != value.shape:
      raise ValueError('Gradient {} has shape {}; parameter has {}.'.format(
          name, grad.shape, value.shape))
    first[name] = state.beta1 * state.first_moment[name] + (
        1.0 - state.beta1) * grad
    second[name] = state.beta2 * state.second_moment[name] + (
        1.0 - state.beta2) * grad * grad
    m_hat = first[name] / first_correction
    v_hat = second[name] / second_correction
    updated[name] = value - state.learning_rate * m_hat / (
        np.sqrt(v_hat) + state.epsilon)
  return updated, state._replace(first_moment=first, second_moment=second,
                                 step=step)


### Normalization ###


class Normalizer(collections.namedtuple(
    'Normalizer', ['names', 'mean', 'scale'])):
  """Per-feature `(x - mean) / max|x - mean|` scaling.

  * `names`: feature names, in column order.
  * `mean`, `scale`: float arrays, one entry per feature; scales positive.
  """
  __slots__ = ()

  def subset(self, names):
    """The normalizer restricted to `names`, in that order."""
    indices = [self.index(name) for name in names]
    return Normalizer(tuple(names), self.mean[indices], self.scale[indices])

  def index(self, name):
    try:
      return self.names.index(name)
    except ValueError:
      raise KeyError('The normalizer has no feature {!r}; it has {}.'.format(
          name, list(self.names)))


def fit_normalizer(data, names):
  """Fit a `Normalizer` to `data`, shape `(..., len(names))`.

  Raises:
    NormalizerError: a feature is constant, so its scale would be zero.
  """
  data = np.asarray(data, dtype=np.float64)
  names = tuple(names)
  if data.shape[-1] != len(names):
    raise ValueError('Data has {} features; got {} names.'.format(
        data.shape[-1], len(names)))
  flat = data.reshape(-1, len(names))
  mean = flat.mean(axis=0)
  scale = np.max(np.abs(flat - mean), axis=0)
  for name, value in zip(names, scale):
    if not value > 0:
      raise NormalizerError(name, 'Feature {!r} does not vary, so it cannot be '
                            'normalized.'.format(name))
  return Normalizer(names, mean, scale)


def normalize(norm, x):
  return (np.asarray(x, dtype=np.float64) - norm.mean) / norm.scale


def denormalize(norm, y_norm):
  return np.asarray(y_norm, dtype=np.float64) * norm.scale + norm.mean


### Persistence ###


def save_model(network, normalizer, path):
  """Write `network`, its `normalizer` and its metadata to `path`."""
  header = {'architecture': network.architecture(),
            'normalizer': list(normalizer.names),
            'metadata': network.metadata}
  arrays = [('normalizer.mean', normalizer.mean),
            ('normalizer.scale', normalizer.scale)]
  arrays.extend(six.iteritems(network.params))
  recording.write_container(path, MODEL_MAGIC, header, arrays)


def load_model(path):
  """Read a model written by `save_model`.

  Returns:
    a 2-tuple `(network, normalizer)`.

  Raises:
    recording.FormatError: not a model file, or an inconsistent one.
    recording.ChecksumError: the file is truncated or corrupted.
    recording.VersionError: the file comes from another format version.
  """
  header, arrays = recording.read_container(path, MODEL_MAGIC)
  try:
    architecture = header['architecture']
    normalizer = Normalizer(tuple(header['normalizer']),
                            arrays.pop('normalizer.mean'),
                            arrays.pop('normalizer.scale'))
    network = Network(arrays, architecture['dropout'],
                      architecture['candidate'], header.get('metadata'))
  except (KeyError, ValueError) as error:
    raise recording.FormatError('{} is not a consistent model file: {}'.format(
        path, error))
  return network, normalizer
