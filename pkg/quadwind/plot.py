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

"""The quadwind "Plot" blackboard.

All details are in the docstring for `Plot`.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import collections

from quadwind.protocols import logging as qw_logging


class Plot(dict):
  """A blackboard shared by everything taking part in one run.

  A `Simulator`, its wind field and its controller do not call each other for
  bookkeeping; they leave messages and counters here. The same goes for the
  trainer and the evaluator. A `Plot` is just a `dict` with a few extra methods
  and properties, so participants may also store whatever free-form entries
  they like (responsibly; `setdefault` is your friend).

  Structured content:

  * log messages, added with `log` and drained with
    `protocols.logging.consume`;
  * event counters, bumped with `count` and read back from `counts`
    (e.g. how many steps saw the rotor allocation saturate);
  * the simulation clock, `time` and `frame`, which only the `Simulator`
    advances.
  """

  def __init__(self):
    """Construct a new `Plot` object."""
    super(Plot, self).__init__()
    # Advanced to 0 by the `Simulator` before anyone else sees it.
    self._frame = -1
    self._time = 0.0
    self._counts = collections.Counter()

  def log(self, message):
    """Log a message for eventual disposal by whoever drives the run.

    Syntactic sugar for `protocols.logging.log(self, message)`.

    Args:
      message: A string message to convey.
    """
    qw_logging.log(self, message)

  def count(self, event, increment=1):
    """Add `increment` to the counter for `event`; returns the new total."""
    self._counts[event] += increment
    return self._counts[event]

  @property
  def counts(self):
    """A copy of all event counters, as a plain `dict`."""
    return dict(self._counts)

  @property
  def frame(self):
    """Number of simulation steps taken so far, minus one."""
    return self._frame

  @property
  def time(self):
    """Simulation time in seconds at the start of the current step."""
    return self._time

  def _advance_clock(self, time):
    """For `Simulator` use only: start a new step at `time` seconds."""
    self._frame += 1
    self._time = float(time)
