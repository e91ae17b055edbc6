import math

import numpy as np
import pytest

import rank2


def small_spec():
    return {
        "w1": [0.5, 0.3, 0.2],
        "w2": [0.4, 0.1],
        "Q": [[2.0, 3.0], [3.0, 1.5]],
    }


def test_masses_are_conserved_and_ordered():
    masses, counts = rank2.component_masses(small_spec(), seed=3)
    assert masses.shape[1] == 2
    assert masses[:, 0].sum() == pytest.approx(1.0)
    assert masses[:, 1].sum() == pytest.approx(0.5)
    assert counts.sum() == 5
    assert np.all(np.diff(masses[:, 0]) <= 0)


def test_top_k_is_a_prefix():
    spec = rank2.bip_er_spec(300, 3000, 1.0)["spec"]
    full, _ = rank2.component_masses(spec, seed=11)
    top, _ = rank2.component_masses(spec, seed=11, top_k=2)
    assert np.array_equal(top, full[:2])


def test_same_seed_same_zeta():
    a = rank2.zeta(1.0, [0.5], 0.5, seed=4)
    b = rank2.zeta(1.0, [0.5], 0.5, seed=4)
    assert a == b
    assert a["lengths"] == sorted(a["lengths"], reverse=True)
    assert sum(a["lengths"]) <= a["horizon"] + 1e-9


def test_ks_examples():
    d, p = rank2.ks_two_sample([1, 2, 3], [1, 2, 3])
    assert d == 0 and p == 1
    d, _ = rank2.ks_two_sample([0, 1], [5, 6])
    assert d == 1


def test_size_biased_order_skips_zeros():
    order = rank2.size_biased_order([0.0, 2.0, 1.0], seed=1)
    assert sorted(order) == [1, 2]
    order = rank2.size_biased_order([0.0, 2.0, 1.0], seed=1, exponential=True)
    assert sorted(order) == [1, 2]


def test_bipartite_light_weights():
    out = rank2.bip_er_spec(64, 64, 0.5)
    s = rank2.validate_spec(out["spec"])
    q = s["Q"]
    assert q[0][0] == 0 and q[1][1] == 0
    assert q[0][1] == pytest.approx(64 ** (1 / 3) + 0.5)


def test_errors_raise():
    bad = small_spec()
    bad["Q"] = [[1.0, 2.0], [3.0, 1.0]]
    with pytest.raises(rank2.Rank2Error, match="InvalidModel"):
        rank2.component_masses(bad, seed=1)
    with pytest.raises(ValueError):
        rank2.zeta(-1.0)


def test_tiny_experiment():
    cfg = {
        "model": {"source": "kernel", "K": [[0.5, 0.5], [0.5, 0.5]], "type2_ratio": 1.0},
        "regime": "classic",
        "n_ladder": [200],
        "replicas": 10,
        "limit": {"replicas": 10, "h": 0.01},
        "seed": 7,
    }
    r = rank2.run_experiment(cfg)
    assert len(r["rungs"]) == 1
    assert math.isfinite(r["rungs"][0]["ranks"][0]["ks_p_value"])
