# Copyright 2026 The dpmean Authors
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

"""Person-level differentially private mean estimation."""

import json

import numpy as np

from dpmean._dpmean import (
    EstimationFailed,
    bound_berry_esseen,
    bound_heavytail,
    bound_highd,
    bound_markov,
    bound_norm_onesample,
    lemma_checks,
    selftest,
)
from dpmean import _dpmean

ESTIMATORS = ("est1d", "hd_single", "hd_two_round", "pure_dp")


def estimate(estimator, samples, epsilon, delta=0.0, k=4.0, alpha=0.1,
             beta=0.1, R=4.0, seed=0):
  """Runs one estimator on samples shaped (n, m) or (n, m, d).

  Returns the report as a dict with keys such as "estimate", "ledger" and
  the estimator's scalars.
  """
  text = _dpmean.estimate(estimator, np.asarray(samples, dtype=np.float64),
                          epsilon, delta, k, alpha, beta, R, seed)
  return json.loads(text)


def sample_dataset(spec, n, m, seed=0):
  """Draws an (n, m, d) array from a synthetic spec given as a dict."""
  return _dpmean.sample_dataset(json.dumps(spec), n, m, seed)


def mc_tail(spec, m, t_grid, trials=100000, seed=0, one_sided=False):
  return _dpmean.mc_tail(json.dumps(spec), m, list(t_grid), trials, seed,
                         one_sided)


def run_experiment(config):
  """Runs an experiment config (dict) and returns the CSV text."""
  return _dpmean.run_experiment_csv(json.dumps(config))


__all__ = [
    "ESTIMATORS",
    "EstimationFailed",
    "bound_berry_esseen",
    "bound_heavytail",
    "bound_highd",
    "bound_markov",
    "bound_norm_onesample",
    "estimate",
    "lemma_checks",
    "mc_tail",
    "run_experiment",
    "sample_dataset",
    "selftest",
]
