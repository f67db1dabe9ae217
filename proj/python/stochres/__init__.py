# Copyright 2026 The stochres Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Stochastic bit reservoirs."""

from ._core import (
    StochresError,
    __version__,
    bernoulli_channel,
    capacity,
    classify_tails,
    correlated_flip_check,
    detection_sample_size,
    eigentask_decomposition,
    fat_shattering_lower_bound,
    gram_matrices,
    ipc,
    moments_from_probabilities,
    noisy_shift_register_ipc,
    probabilities_from_moments,
    rotation_pair,
    run_exact,
    run_experiment,
    sample_complexity_curve,
    switching_family,
)

__all__ = [
    "StochresError",
    "__version__",
    "bernoulli_channel",
    "capacity",
    "classify_tails",
    "correlated_flip_check",
    "detection_sample_size",
    "eigentask_decomposition",
    "fat_shattering_lower_bound",
    "gram_matrices",
    "ipc",
    "moments_from_probabilities",
    "noisy_shift_register_ipc",
    "probabilities_from_moments",
    "rotation_pair",
    "run_exact",
    "run_experiment",
    "sample_complexity_curve",
    "switching_family",
]
