import math

import numpy as np
import pytest

from bifbmlab import (
    CHECKS,
    Comparison,
    ConfigError,
    KernelParams,
    MCEstimate,
    PreconditionViolated,
    ResultKind,
    SweepConfig,
    TimeGrid,
    Verdict,
    check_drift_comparison,
    check_sup_sandwich,
    increment_domination_holds,
    one_sided_verdict,
    two_point_sandwich,
)
from bifbmlab.harness import _gate, refinement_rows, tail_curve_rows

# record counts per sweep point at the default functional levels
EXPECTED_COUNTS = {
    "scaling": 12,
    "sup_sandwich": 2,
    "increment_convex": 6,
    "drift_comparison": 86,
    "floor_and_tails": 55,
    "exponential_concentration": 4,
    "reflection_symmetry": 15,
}


def small_cfg(**kw):
    base = dict(H=(0.5,), K=(0.75,), n=32, M=5000, seed=20260821)
    base.update(kw)
    cfg = SweepConfig(**base)
    cfg.validate()
    return cfg


@pytest.fixture(scope="module")
def small_results():
    cfg = small_cfg()
    return {name: fn(cfg) for name, fn in CHECKS.items()}


def est(mean, stderr=0.0, unreliable=False):
    return MCEstimate(mean=mean, stderr=stderr, M=100, unreliable=unreliable)


def test_one_sided_verdict_cases():
    assert one_sided_verdict(est(1.0), est(1.0), 4.0) is Verdict.PASS
    assert one_sided_verdict(est(1.0), est(0.9), 4.0) is Verdict.FAIL
    assert one_sided_verdict(est(1.0, 0.1), est(0.9), 4.0) is Verdict.PASS
    assert one_sided_verdict(est(1.0, 0.1), est(0.5), 4.0) is Verdict.FAIL
    assert one_sided_verdict(est(1.0, unreliable=True), est(2.0), 4.0) is Verdict.INCONCLUSIVE
    assert one_sided_verdict(est(float("nan")), est(2.0), 4.0) is Verdict.INCONCLUSIVE


def test_increment_domination_direct():
    grid = TimeGrid.uniform(16, 1.0)
    p = KernelParams.bifbm(0.5, 0.5)
    assert increment_domination_holds(p, grid, Comparison.Y1)
    assert increment_domination_holds(p, grid, Comparison.Y2)
    # extended regime: upper domination fails near the origin, lower holds
    q = KernelParams.bifbm(0.3, 1.5)
    assert not increment_domination_holds(q, grid, Comparison.Y1)
    assert increment_domination_holds(q, grid, Comparison.Y2)


def test_gate_raises_only_where_theory_guarantees():
    grid = TimeGrid.uniform(8, 1.0)
    with pytest.raises(PreconditionViolated):
        _gate(KernelParams.bifbm(0.5, 0.5), grid, Comparison.Y1, extra_ok=False)
    # K > 1: a failed hypothesis is an expected regime boundary, not a defect
    assert _gate(KernelParams.bifbm(0.3, 1.5), grid, Comparison.Y1) is False


def test_record_counts(small_results):
    for name, results in small_results.items():
        assert len(results) == EXPECTED_COUNTS[name], name


def test_small_sweep_all_pass(small_results):
    bad = [
        r.check_id
        for results in small_results.values()
        for r in results
        if r.verdict is not Verdict.PASS
    ]
    assert bad == []


def test_check_id_grammar(small_results):
    for name, results in small_results.items():
        for r in results:
            assert r.check_id.startswith(f"{name}/H=0.5,K=0.75"), r.check_id
    ids = [r.check_id for r in small_results["sup_sandwich"]]
    assert ids == [
        "sup_sandwich/H=0.5,K=0.75/upper",
        "sup_sandwich/H=0.5,K=0.75/lower",
    ]


def test_config_echo(small_results):
    for results in small_results.values():
        for r in results:
            if r.config.get("check") == "two_point":
                continue
            for key in ("check", "H", "K", "T", "n", "M", "seed"):
                assert key in r.config, r.check_id
            assert r.config["seed"] == 20260821


def test_scaling_kinds(small_results):
    results = small_results["scaling"]
    coupled = [r for r in results if "/coupled/" in r.check_id]
    independent = [r for r in results if "/independent/" in r.check_id]
    assert len(coupled) == len(independent) == 6
    for r in coupled:
        assert r.kind is ResultKind.EXACT
        assert r.tol > 0.0
        assert abs(r.margin) <= r.tol
    for r in independent:
        assert r.kind is ResultKind.TWO_SIDED
        assert r.z_crit == 3.0


def test_reflection_coupled_exact(small_results):
    results = small_results["reflection_symmetry"]
    coupled = [r for r in results if r.check_id.endswith("/coupled")]
    assert len(coupled) == 6
    for r in coupled:
        assert r.kind is ResultKind.EXACT
        assert r.tol == 0.0
        assert r.margin == 0.0  # stream-coupled counts agree exactly


def test_quadrature_cross_checks(small_results):
    results = small_results["floor_and_tails"]
    quads = [r for r in results if "/quadrature/" in r.check_id]
    assert len(quads) == 9
    for r in quads:
        assert r.kind is ResultKind.TWO_SIDED
        assert r.tol == 1e-3
        assert r.rhs.note == "tail-curve quadrature"


def test_extended_regime_gating():
    cfg = small_cfg(H=(0.3,), K=(1.5,), M=2000)
    results = check_sup_sandwich(cfg)
    by_side = {r.check_id.rsplit("/", 1)[1]: r for r in results}
    upper, lower = by_side["upper"], by_side["lower"]
    assert upper.verdict is Verdict.INCONCLUSIVE
    assert "extended regime" in upper.note
    assert math.isnan(upper.margin)
    assert upper.lhs.M == 0 and upper.lhs.note == "gated"
    assert lower.verdict is Verdict.PASS


def test_negative_control_fails():
    cfg = small_cfg(M=20_000, invert_roles=True)
    results = check_sup_sandwich(cfg)
    by_side = {r.check_id.rsplit("/", 1)[1]: r for r in results}
    assert by_side["upper"].verdict is Verdict.FAIL
    assert by_side["upper"].z < -8.0


def test_two_point_sandwich_pass():
    results = two_point_sandwich(0.5, 0.5, 0.5, 1.0, M=50_000, seed=7)
    assert len(results) == 5
    assert all(r.verdict is Verdict.PASS for r in results)
    ids = [r.check_id for r in results]
    pid = "two_point/H=0.5,K=0.5/t1=0.5,t2=1.0"
    assert ids == [
        f"{pid}/closed_form/W",
        f"{pid}/closed_form/Y1",
        f"{pid}/closed_form/Y2",
        f"{pid}/ordering/upper",
        f"{pid}/ordering/lower",
    ]
    for r in results[3:]:
        assert r.kind is ResultKind.ONE_SIDED
        assert r.margin >= 0.0  # closed-form ordering is strict, no MC noise


def test_two_point_sandwich_fbm_degeneracy():
    # K = 1: W is fBm(H) and coincides in law with Y1, so the upper ordering
    # margin is exactly zero
    results = two_point_sandwich(0.7, 1.0, 0.25, 1.0, M=20_000, seed=11)
    assert all(r.verdict is Verdict.PASS for r in results)
    upper = [r for r in results if r.check_id.endswith("ordering/upper")][0]
    assert upper.margin == pytest.approx(0.0, abs=1e-15)


def test_two_point_sandwich_validation():
    with pytest.raises(ConfigError):
        two_point_sandwich(0.5, 0.5, 1.0, 0.5, M=100, seed=0)
    with pytest.raises(ConfigError):
        two_point_sandwich(0.5, 0.5, 0.0, 1.0, M=100, seed=0)


def test_refinement_rows_monotone():
    cfg = small_cfg(M=2000)
    rows = refinement_rows(cfg)
    assert [r["n"] for r in rows] == [4, 8, 16, 32]
    means = [r["mean"] for r in rows]
    # coarser sups are maxima over column subsets of the same paths
    assert all(a <= b for a, b in zip(means, means[1:]))
    assert all(r["stderr"] > 0.0 for r in rows)


def test_tail_curve_rows_shape():
    cfg = small_cfg(M=2000)
    rows = tail_curve_rows(cfg, points=5)
    assert len(rows) == 5
    assert rows[0]["u"] == 0.0
    assert rows[0]["p_hat"] == 1.0
    assert rows[-1]["u"] == pytest.approx(3.0 * 1.0 ** 0.375, rel=1e-12)
    ps = [r["p_hat"] for r in rows]
    assert all(a >= b for a, b in zip(ps, ps[1:]))
    assert all(r["process"] == "bifbm(H=0.5,K=0.75)" for r in rows)


def test_anchor_fraction_must_hit_grid():
    cfg = small_cfg(anchor_fracs=(0.3,), M=10)
    with pytest.raises(ConfigError, match="anchor"):
        check_drift_comparison(cfg)


@pytest.mark.parametrize(
    "field,value",
    [
        ("H", (1.5,)),
        ("H", ()),
        ("K", (2.5,)),
        ("T", 0.0),
        ("n", 1),
        ("M", 1),
        ("seed", -1),
        ("z_crit", 0.0),
        ("p_moments", (0.0,)),
        ("anchor_fracs", (1.5,)),
        ("a_levels", (0.0,)),
        ("u_levels", (-1.0,)),
        ("t_levels", (-0.5,)),
        ("horizons", (1.0,)),
        ("rescale_factors", (1.0, 2.0)),
    ],
)
def test_sweep_validation_rejects(field, value):
    cfg = SweepConfig(**{field: value})
    with pytest.raises(ConfigError, match=f"sweep.{field}"):
        cfg.validate()


def test_sweep_validation_extended_needs_hk_below_one():
    cfg = SweepConfig(H=(0.9,), K=(1.5,))
    with pytest.raises(ConfigError, match="extended"):
        cfg.validate()


def test_points_enumeration():
    cfg = SweepConfig(H=(0.25, 0.5), K=(0.5, 1.0))
    assert cfg.points() == [(0.25, 0.5), (0.25, 1.0), (0.5, 0.5), (0.5, 1.0)]
