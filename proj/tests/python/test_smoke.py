"""Smoke tests for the _glwalk extension module.

Deeper numerics live in the C++ test suite; this checks that the bindings
round-trip values faithfully, keep the library's exactness guarantees, and
translate the error taxonomy.
"""

import json
import math

import numpy as np
import pytest

import _glwalk as gw

TWO_POINT = json.dumps(
    {
        "field": "real",
        "n": 2,
        "components": [
            {"weight": 0.6, "law": {"point": [0.7, -0.1]}},
            {"weight": 0.4, "law": {"point": [-0.2, -0.9]}},
        ],
    }
)


def test_version_string():
    assert isinstance(gw.__version__, str) and gw.__version__


def test_rho_values():
    assert np.allclose(gw.rho("real", 2), [0.5, -0.5])
    assert np.allclose(gw.rho("complex", 3), [2.0, 0.0, -2.0])


def test_sample_haar_is_unitary():
    u = gw.sample_haar("real", 4, seed=7)
    assert np.max(np.abs(u.T @ u - np.eye(4))) < 1e-12 * 4
    v = gw.sample_haar("complex", 3, seed=7)
    assert np.max(np.abs(v.conj().T @ v - np.eye(3))) < 1e-12 * 3


def test_spherical_fn_normalized_at_zero():
    est = gw.spherical_fn("real", [0.9, -0.4], [0.0, 0.0], samples=2000, seed=5)
    assert est["mean"] == 1.0 + 0.0j
    assert est["std_error"] == 0.0
    assert est["samples"] == 2000


def test_moment_fn_matches_closed_form_drift():
    est = gw.moment_fn(
        "real",
        [math.log(4.0), 0.0],
        np.array([1, 0], dtype=np.int32),
        samples=200000,
        seed=13,
        partitions=4,
    )
    assert abs(est["mean"] - 2.0 * math.log(1.5)) < 4.0 * est["std_error"] + 1e-10


def test_moment_summary_telescopes():
    ms = gw.moment_summary("complex", [1.1, 0.2, -0.7], samples=4000, seed=3)
    assert ms["sum_identity_std_error"] == 0.0
    assert ms["sum_identity_mean"] == ms["log_det"]
    assert abs(ms["m1"].sum() - ms["log_det"]) < 1e-9
    assert np.max(np.abs(ms["sigma2"] @ np.ones(3))) < 1e-9


def test_normalize_measure_normalizes_weights():
    doc = json.loads(
        gw.normalize_measure(
            json.dumps(
                {
                    "field": "real",
                    "n": 2,
                    "components": [
                        {"weight": 3.0, "law": {"point": [0.5, -0.5]}},
                        {"weight": 7.0, "law": {"point": [0.1, 0.0]}},
                    ],
                }
            )
        )
    )
    weights = [c["weight"] for c in doc["components"]]
    assert abs(weights[0] - 0.3) < 1e-15 and abs(weights[1] - 0.7) < 1e-15


def test_measure_moments_point_mass():
    nu = json.dumps(
        {
            "field": "real",
            "n": 2,
            "components": [{"weight": 1.0, "law": {"point": [math.log(4.0), 0.0]}}],
        }
    )
    mm = gw.measure_moments(nu, outer=1, inner=200000, seed=11)
    assert mm["exact_outer"] is True
    assert abs(mm["m1"][0] - 2.0 * math.log(1.5)) < 4.0 * mm["m1_se"][0] + 1e-10


def test_spherical_transform_at_zero():
    est = gw.spherical_transform(TWO_POINT, [0.0, 0.0], outer=1, inner=500, seed=6)
    assert est["mean"] == 1.0 + 0.0j
    assert est["std_error"] == 0.0


def test_transform_derivatives_shapes():
    d = gw.transform_derivatives(TWO_POINT, h=1e-3, outer=1, inner=2000, seed=6)
    assert d["grad"].shape == (2,)
    assert d["hess"].shape == (2, 2)
    assert np.all(d["grad"].real == 0.0)


def test_run_walk_telescopes_and_sorts():
    traj = gw.run_walk(TWO_POINT, [1, 4, 16], seed=21)
    chambers = traj["chambers"]
    sums = traj["chamber_sums"]
    assert chambers.shape == (3, 2)
    for j in range(3):
        assert abs(chambers[j].sum() - sums[j]) < 1e-9 * max(1.0, abs(sums[j]))
        assert chambers[j][0] >= chambers[j][1]


def test_clt_ensemble_and_gaussian_compare():
    s = gw.clt_ensemble(TWO_POINT, k=8, trials=64, seed=9, statistic_tol=0.05, partitions=2)
    assert s["t_values"].shape == (64, 2)
    rep = gw.gaussian_compare(s["t_values"], s["nu_moments"]["sigma2"])
    for key in ("mean_norm", "cov_frobenius_rel_err", "cov_rank", "ks_p_values", "mardia"):
        assert key in rep
    assert rep["cov_rank"] >= 1


def test_oscillation_scan_smoke():
    grid = gw.lambda_log_grid(2, 0.05, 1.0, 3, 3, seed=4)
    assert len(grid) == 9
    scan = gw.oscillation_scan("real", [0.8, -0.5], grid, samples=4000, seed=4, partitions=2)
    assert scan["ratio2"].shape == (9,)
    assert math.isfinite(scan["sup_ratio2"]) and scan["sup_ratio2"] > 0
    assert scan["inf_ratio2_smallest_shell"] > 0


def test_determinism_across_reruns():
    a = gw.spherical_fn("real", [0.9, -0.4], [0.6, -0.2], samples=3000, seed=17, partitions=3)
    b = gw.spherical_fn("real", [0.9, -0.4], [0.6, -0.2], samples=3000, seed=17, partitions=3)
    assert a == b
    ta = gw.run_walk(TWO_POINT, [5, 10], seed=33)
    tb = gw.run_walk(TWO_POINT, [5, 10], seed=33)
    assert np.array_equal(ta["chambers"], tb["chambers"])
    assert ta["chamber_sums"] == tb["chamber_sums"]


def test_error_taxonomy_maps_to_python():
    with pytest.raises(ValueError):
        gw.measure_moments('{"field": "real"}', outer=4, inner=8, seed=1)
    with pytest.raises(ValueError):
        gw.spherical_fn("quaternion", [0.0, 0.0], [0.0, 0.0], samples=16, seed=1)
    with pytest.raises(ValueError):
        gw.spherical_fn("real", [-1.0, 1.0], [0.0, 0.0], samples=16, seed=1)


def test_verification_suite_small():
    rep = gw.run_verification(instances=100, mc_samples=20000, seed=2, partitions=2)
    assert rep["all_passed"] is True
    names = {c["name"] for c in rep["checks"]}
    assert "log_minor_linear_independence" in names
    bad = gw.run_verification(instances=50, mc_samples=10000, seed=2, inject_corruption=True)
    assert bad["all_passed"] is False
