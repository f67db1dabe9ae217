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

import math

import numpy as np
import pytest

import stochres


LINEAR_BIT = {
    "n": 1,
    "gates": [
        {
            "support": [0],
            "kernel_kind": "reset",
            "params": {"probability": {"kind": "polynomial", "coeffs": [0.5, 0.5]}},
        }
    ],
}


def gauss_legendre_uniform(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights / 2.0


def test_single_bit_anchor():
    nodes, weights = gauss_legendre_uniform(64)
    probs = np.array([stochres.run_exact(LINEAR_BIT, [u])[0] for u in nodes])
    g1, g2 = stochres.gram_matrices(probs, weights)
    np.testing.assert_allclose(g1, [[1 / 3, 1 / 6], [1 / 6, 1 / 3]], atol=1e-13)
    np.testing.assert_allclose(g2, np.eye(2) / 2, atol=1e-13)
    out = stochres.ipc(probs, weights)
    assert out["spectral"] == pytest.approx(4 / 3, abs=1e-12)
    assert out["probability_trace"] == pytest.approx(4 / 3, abs=1e-12)
    np.testing.assert_allclose(out["sigma_sq"], [0.0, 2.0], atol=1e-12)


def test_transforms_round_trip():
    rng = np.random.default_rng(3)
    p = rng.random(64)
    p /= p.sum()
    m = stochres.moments_from_probabilities(p, 6)
    brute = [sum(p[x] for x in range(64) if x & a == a) for a in range(64)]
    np.testing.assert_allclose(m, brute, atol=1e-14)
    np.testing.assert_allclose(stochres.probabilities_from_moments(m, 6), p, atol=1e-14)


def test_capacity_of_span_and_orthogonal_targets():
    x = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0]])
    assert stochres.capacity(x, [3.0, -1.0, 2.0, 7.0]) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(stochres.StochresError) as err:
        stochres.capacity(x, [0.0, 0.0, 0.0, 0.0])
    assert err.value.kind == "ZeroTarget"


def test_shift_register_and_learnability():
    assert stochres.noisy_shift_register_ipc(3, 0.0) == pytest.approx(8.0)
    assert stochres.noisy_shift_register_ipc(5, 0.5) == pytest.approx(1.0)
    curve = stochres.sample_complexity_curve(0.01, [10], 1000, seed=2)
    assert curve["exact_all_zero"][0] == pytest.approx(0.99**10, abs=1e-12)
    assert stochres.detection_sample_size(0.5) == 1


def test_switching_and_shattering():
    fam = stochres.switching_family("exponential", 4, 0.0, 1.0, 7.64)
    signals = np.array(fam["signals"])
    np.testing.assert_allclose(signals.sum(axis=0), 1.0, atol=1e-12)
    d, witness = stochres.fat_shattering_lower_bound([[0.0], [1.0]], 0.4)
    assert d == 1
    assert witness["thresholds"] == [pytest.approx(0.5)]


def test_quantum_embed():
    rho = np.array([[1, 0], [0, 0]], dtype=complex)
    out = stochres.bernoulli_channel(0.25, rho)
    np.testing.assert_allclose(np.diag(out).real, [0.25, 0.75], atol=1e-12)
    u1, u2 = stochres.rotation_pair(0.25)
    np.testing.assert_allclose(u1 @ u1.conj().T, np.eye(2), atol=1e-14)
    flip = stochres.correlated_flip_check(math.pi / 6)
    assert flip["populations"][3] == pytest.approx(0.25, abs=1e-12)


def test_run_experiment(tmp_path):
    manifest = stochres.run_experiment({"experiment": "embed-check", "out_dir": str(tmp_path)})
    assert manifest["checks_passed"]
    assert (tmp_path / "embed_check.json").exists()
    with pytest.raises(stochres.StochresError) as err:
        stochres.run_experiment({"experiment": "scan-n", "params": {"nosie": 1}})
    assert err.value.kind == "ConfigValidation"
