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

"""Simple message logging for simulations, training and evaluation.

Library code in quadwind never prints. Simulators, wind fields, trainers and
evaluators leave messages on a `Plot` object instead, and whoever drives them
(the command-line front end, a notebook, a test) collects the messages with
`consume` and shows them however it likes. A run that keeps its own `Plot`
(as `engine.simulate` does) hands its messages on with `relay`.

Most code will not need to import this protocol directly, since `Plot` has a
`log` method that is syntactic sugar for `log` here.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

_MESSAGES = 'log_messages'


def log(the_plot, message):
  """Log a message for eventual disposal by whoever drives the run.

  Args:
    the_plot: the run's `Plot` object.
    message: a string message to convey.
  """
  the_plot.setdefault(_MESSAGES, []).append(message)


def consume(the_plot):
  """Remove and return the messages logged since the last `consume`.

  Args:
    the_plot: the run's `Plot` object.

  Returns:
    the list of messages, oldest first; empty if there are none.
  """
  messages = the_plot.setdefault(_MESSAGES, [])
  drained = messages[:]
  del messages[:]
  return drained


def relay(source, destination):
  """Move every pending message of `source` onto `destination`, in order.

  Returns:
    the number of messages moved.
  """
  messages = consume(source)
  for message in messages:
    log(destination, message)
  return len(messages)
