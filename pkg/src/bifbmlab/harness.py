"""Monte Carlo verification of maximal-inequality comparisons.

Each check samples bifractional paths W (H, K) and, where the comparison
hypotheses hold, the two scaled fractional processes

    Y1 = 2^{(1-K)/2} fBm(HK)   (increments dominate W's from above)
    Y2 = 2^{-K/2}    fBm(HK)   (increments dominated from below)

and tests expectation inequalities of the form E f(W) <= E f(Y1) and
E f(Y2) <= E f(W) with one-sided z verdicts, plus exact identities for
stream-coupled constructions (self-similarity).

Hypothesis gates: before any comparison, the increment-domination (and,
where required, variance-domination) hypotheses are verified directly on
the kernel. For K <= 1 the theory guarantees them, so a gate failure
raises PreconditionViolated (a kernel defect). For K > 1 the upper
domination genuinely fails near the origin, so gated results are emitted
as INCONCLUSIVE rather than FAIL.

Every batch label folds the base seed through the check id, so checks and
configurations are on independent streams and any FAIL reproduces in
isolation from (seed, check_id).

The negative-control hook ``invert_roles`` swaps the Y1/Y2 sampling scales
*after* the gates run: the hypotheses verified are the honest ones, but the
sampled comparisons are backwards, so a healthy harness must emit FAILs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigError, PreconditionViolated
from .estimators import (
    Base,
    DriftSpec,
    FunctionalDescriptor,
    MCEstimate,
    Transform,
    functional_values,
    integrated_tail_quadrature,
    mc_estimate,
)
from .grids import TimeGrid
from .kernels import (
    Comparison,
    KernelParams,
    _pow,
    comparison_scale,
    gram_matrix,
    kernel_cov,
    increment_variance,
    variance_domination,
)
from .sampling import PathBatch, cholesky_factor, sample_fbm_circulant, sample_paths
from .streams import derive_stream, fold_label


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


class ResultKind(enum.Enum):
    ONE_SIDED = "one_sided"  # PASS iff rhs - lhs >= -(z_crit * se + tol)
    TWO_SIDED = "two_sided"  # PASS iff |rhs - lhs| <= z_crit * se + tol
    EXACT = "exact"  # PASS iff |rhs - lhs| <= tol


@dataclass
class CheckResult:
    check_id: str
    kind: ResultKind
    verdict: Verdict
    margin: float
    z: float
    z_crit: float
    lhs: MCEstimate
    rhs: MCEstimate
    tol: float = 0.0
    config: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class SweepConfig:
    """Parameter sweep shared by all checks; defaults give the standard run."""

    H: tuple = (0.25, 0.5, 0.75)
    K: tuple = (0.5, 0.75, 1.0)
    T: float = 1.0
    n: int = 512
    M: int = 200_000
    seed: int = 20260821
    z_crit: float = 4.0
    p_moments: tuple = (1.0, 2.0)
    drifts: tuple = (
        DriftSpec.zero(),
        DriftSpec(a=1.0, b=1.0),
        DriftSpec(a=-2.0, b=1.0),
        DriftSpec(a=0.1, b=2.0),
    )
    floor_levels: tuple = (0.0, 0.5)  # in units of T^{HK}
    anchor_fracs: tuple = (0.0, 0.5)  # anchor time as a fraction of T
    a_levels: tuple = (0.5, 1.0, 1.5)  # concentration offsets, units of T^{HK}
    u_levels: tuple = (0.5, 1.0, 1.5)  # tail thresholds, units of T^{HK}
    t_levels: tuple = (0.0, 0.5, 1.0)  # hinge thresholds, units of T^{HK}
    hinge_g_level: float = 0.5  # hinge threshold of the convex catalogs
    horizons: tuple = (0.5, 1.0, 2.0)
    rescale_factors: tuple = (0.5, 2.0)
    invert_roles: bool = False  # negative control; see module docstring

    def validate(self) -> None:
        if not self.H or not all(0.0 < h < 1.0 for h in self.H):
            raise ConfigError(f"sweep.H must be nonempty with values in (0,1), got {self.H}")
        if not self.K or not all(0.0 < k < 2.0 for k in self.K):
            raise ConfigError(f"sweep.K must be nonempty with values in (0,2), got {self.K}")
        for h in self.H:
            for k in self.K:
                if k > 1.0 and not h * k < 1.0:
                    raise ConfigError(
                        f"sweep point H={h}, K={k} needs H*K < 1 in the extended regime"
                    )
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError(f"sweep.T must be positive, got {self.T}")
        if self.n < 2:
            raise ConfigError(f"sweep.n must be >= 2, got {self.n}")
        if self.M < 2:
            raise ConfigError(f"sweep.M must be >= 2, got {self.M}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"sweep.seed must be a uint64, got {self.seed}")
        if self.z_crit <= 0:
            raise ConfigError(f"sweep.z_crit must be > 0, got {self.z_crit}")
        if not all(p > 0 for p in self.p_moments):
            raise ConfigError(f"sweep.p_moments must be > 0, got {self.p_moments}")
        if not all(0.0 <= f <= 1.0 for f in self.anchor_fracs):
            raise ConfigError(f"sweep.anchor_fracs must lie in [0,1], got {self.anchor_fracs}")
        if not all(a > 0 for a in self.a_levels):
            raise ConfigError(f"sweep.a_levels must be > 0, got {self.a_levels}")
        if not all(u > 0 for u in self.u_levels):
            raise ConfigError(f"sweep.u_levels must be > 0, got {self.u_levels}")
        if not all(t >= 0 for t in self.t_levels):
            raise ConfigError(f"sweep.t_levels must be >= 0, got {self.t_levels}")
        if len(self.horizons) < 2 or not all(t > 0 for t in self.horizons):
            raise ConfigError(
                f"sweep.horizons needs >= 2 positive horizons, got {self.horizons}"
            )
        if not all(r > 0 and r != 1.0 for r in self.rescale_factors):
            raise ConfigError(
                f"sweep.rescale_factors must be positive and != 1, got {self.rescale_factors}"
            )

    def points(self) -> List[Tuple[float, float]]:
        return [(h, k) for h in self.H for k in self.K]


# ---------------------------------------------------------------------------
# verdict machinery


def one_sided_verdict(
    lhs: MCEstimate, rhs: MCEstimate, z_crit: float, tol: float = 0.0
) -> Verdict:
    """PASS iff rhs.mean - lhs.mean >= -(z_crit * combined stderr + tol).

    tol is an absolute allowance for comparisons of computed exact values,
    where representation rounding can push a true zero margin negative.
    """
    if lhs.unreliable or rhs.unreliable:
        return Verdict.INCONCLUSIVE
    margin = rhs.mean - lhs.mean
    if not math.isfinite(margin):
        return Verdict.INCONCLUSIVE
    se = math.hypot(lhs.stderr, rhs.stderr)
    return Verdict.PASS if margin >= -(z_crit * se + tol) else Verdict.FAIL


def _zscore(margin: float, se: float) -> float:
    if not math.isfinite(margin):
        return float("nan")
    if se > 0.0:
        return margin / se
    if margin == 0.0:
        return 0.0
    return math.copysign(float("inf"), margin)


def _result(
    check_id: str,
    lhs: MCEstimate,
    rhs: MCEstimate,
    kind: ResultKind,
    z_crit: float,
    config: dict,
    tol: float = 0.0,
    note: str = "",
) -> CheckResult:
    margin = rhs.mean - lhs.mean
    se = math.hypot(lhs.stderr, rhs.stderr)
    z = _zscore(margin, se)
    if lhs.unreliable or rhs.unreliable or not math.isfinite(margin):
        verdict = Verdict.INCONCLUSIVE
    elif kind is ResultKind.ONE_SIDED:
        verdict = one_sided_verdict(lhs, rhs, z_crit, tol)
    elif kind is ResultKind.TWO_SIDED:
        verdict = Verdict.PASS if abs(margin) <= z_crit * se + tol else Verdict.FAIL
    else:
        verdict = Verdict.PASS if abs(margin) <= tol else Verdict.FAIL
    return CheckResult(
        check_id=check_id,
        kind=kind,
        verdict=verdict,
        margin=margin,
        z=z,
        z_crit=z_crit,
        lhs=lhs,
        rhs=rhs,
        tol=tol,
        config=config,
        note=note,
    )


def _gated(check_id: str, kind: ResultKind, z_crit: float, config: dict) -> CheckResult:
    note = "hypothesis not satisfied in extended regime; comparison skipped"
    placeholder = MCEstimate(mean=float("nan"), stderr=float("nan"), M=0, note="gated")
    return CheckResult(
        check_id=check_id,
        kind=kind,
        verdict=Verdict.INCONCLUSIVE,
        margin=float("nan"),
        z=float("nan"),
        z_crit=z_crit,
        lhs=placeholder,
        rhs=placeholder,
        config=config,
        note=note,
    )


# ---------------------------------------------------------------------------
# hypothesis gates


def increment_domination_holds(
    params: KernelParams, grid: TimeGrid, which: Comparison
) -> bool:
    """Whether the increment-variance hypothesis holds on grid (origin included).

    Y1: E(W_t - W_s)^2 <= Var(Y1_t - Y1_s) for all grid s, t;
    Y2: the reverse domination.
    """
    t = grid.times_with_origin
    cov = np.asarray(kernel_cov(t[:, None], t[None, :], params))
    d = np.diag(cov)
    incvar = np.maximum(d[:, None] + d[None, :] - 2.0 * cov, 0.0)
    bound = comparison_scale(params.K, which) ** 2 * _pow(
        np.abs(t[:, None] - t[None, :]), 2.0 * params.hk
    )
    tol = 1e-10 * max(1.0, float(bound.max()))
    if which is Comparison.Y1:
        return bool(np.all(incvar <= bound + tol))
    return bool(np.all(incvar >= bound - tol))


def _gate(params: KernelParams, grid: TimeGrid, which: Comparison, extra_ok: bool = True) -> bool:
    """Evaluate a side's hypotheses; distinguish defect from extended regime."""
    ok = increment_domination_holds(params, grid, which) and extra_ok
    if not ok and params.K <= 1.0:
        raise PreconditionViolated(
            f"comparison hypothesis for {which.value} failed at H={params.H}, "
            f"K={params.K} where the theory guarantees it"
        )
    return ok


# ---------------------------------------------------------------------------
# sampling helpers


def _point_id(check: str, h: float, k: float) -> str:
    return f"{check}/H={h!r},K={k!r}"


def _echo(cfg: SweepConfig, check: str, h: float, k: float, **extra) -> dict:
    d = {
        "check": check,
        "H": h,
        "K": k,
        "T": cfg.T,
        "n": cfg.n,
        "M": cfg.M,
        "seed": cfg.seed,
    }
    d.update(extra)
    return d


def _sample_w(cfg: SweepConfig, params: KernelParams, grid: TimeGrid, label: str) -> PathBatch:
    factor = cholesky_factor(gram_matrix(grid, params))
    return sample_paths(factor, cfg.M, derive_stream(fold_label(cfg.seed, label), 0))


def _y_scale(cfg: SweepConfig, K: float, which: Comparison) -> float:
    if cfg.invert_roles:
        which = Comparison.Y2 if which is Comparison.Y1 else Comparison.Y1
    return comparison_scale(K, which)


def _sample_y(
    cfg: SweepConfig,
    params: KernelParams,
    grid: TimeGrid,
    which: Comparison,
    label: str,
) -> PathBatch:
    scale = _y_scale(cfg, params.K, which)
    stream = derive_stream(fold_label(cfg.seed, label), 0)
    if grid.is_uniform:
        return sample_fbm_circulant(params.hk, grid.n, grid.T, cfg.M, stream, scale=scale)
    factor = cholesky_factor(gram_matrix(grid, KernelParams.fbm(params.hk)))
    batch = sample_paths(factor, cfg.M, stream)
    batch.values[:, 1:] *= scale
    batch.label = replace(batch.label, scale=scale)
    return batch


def _estimates(batch: PathBatch, descs: dict) -> dict:
    """mc_estimate for every descriptor; batch can be freed afterwards."""
    return {key: mc_estimate(batch, d) for key, d in descs.items()}


def _anchor_index(grid: TimeGrid, frac: float) -> int:
    """Column of the origin-inclusive path for anchor time frac * T."""
    if frac == 0.0:
        return 0
    target = frac * grid.T
    t = grid.times_with_origin
    idx = int(np.argmin(np.abs(t - target)))
    if abs(t[idx] - target) > 1e-9 * grid.T:
        raise ConfigError(
            f"anchor fraction {frac} (time {target}) is not a grid point"
        )
    return idx


def _convex_catalog(cfg: SweepConfig, unit: float) -> List[Tuple[str, Transform, bool]]:
    """(name, transform, needs_nonnegative_base) catalog of convex, nondecreasing g."""
    return [
        ("identity", Transform.identity(), False),
        ("square", Transform.moment(2.0), True),
        (f"hinge{cfg.hinge_g_level!r}", Transform.hinge(cfg.hinge_g_level * unit), False),
    ]


# ---------------------------------------------------------------------------
# checks


def check_sup_sandwich(cfg: SweepConfig) -> List[CheckResult]:
    """E sup Y2 <= E sup W <= E sup Y1 over the sweep."""
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        pid = _point_id("sup_sandwich", h, k)
        ok1 = _gate(params, grid, Comparison.Y1)
        ok2 = _gate(params, grid, Comparison.Y2)
        desc = {"sup": FunctionalDescriptor(base=Base.SUP)}

        west = None
        if ok1 or ok2:
            w = _sample_w(cfg, params, grid, pid + "/W")
            west = _estimates(w, desc)
            del w
        for which, ok, side in ((Comparison.Y1, ok1, "upper"), (Comparison.Y2, ok2, "lower")):
            cid = f"{pid}/{side}"
            echo = _echo(cfg, "sup_sandwich", h, k, side=side)
            if not ok:
                out.append(_gated(cid, ResultKind.ONE_SIDED, cfg.z_crit, echo))
                continue
            y = _sample_y(cfg, params, grid, which, f"{pid}/{which.value}")
            yest = _estimates(y, desc)
            del y
            if side == "upper":
                lhs, rhs = west["sup"], yest["sup"]
            else:
                lhs, rhs = yest["sup"], west["sup"]
            out.append(_result(cid, lhs, rhs, ResultKind.ONE_SIDED, cfg.z_crit, echo))
    return out


def check_increment_convex(cfg: SweepConfig) -> List[CheckResult]:
    """E g(sup increment) sandwiched for convex nondecreasing g."""
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        pid = _point_id("increment_convex", h, k)
        unit = _pow(cfg.T, params.hk)
        ok1 = _gate(params, grid, Comparison.Y1)
        ok2 = _gate(params, grid, Comparison.Y2)
        descs = {
            name: FunctionalDescriptor(base=Base.SUP_INCREMENT, transform=tr)
            for name, tr, _ in _convex_catalog(cfg, unit)
        }

        west = None
        if ok1 or ok2:
            w = _sample_w(cfg, params, grid, pid + "/W")
            west = _estimates(w, descs)
            del w
        for which, ok, side in ((Comparison.Y1, ok1, "upper"), (Comparison.Y2, ok2, "lower")):
            yest = None
            if ok:
                y = _sample_y(cfg, params, grid, which, f"{pid}/{which.value}")
                yest = _estimates(y, descs)
                del y
            for name in descs:
                cid = f"{pid}/g={name}/{side}"
                echo = _echo(cfg, "increment_convex", h, k, side=side, g=name)
                if not ok:
                    out.append(_gated(cid, ResultKind.ONE_SIDED, cfg.z_crit, echo))
                    continue
                if side == "upper":
                    lhs, rhs = west[name], yest[name]
                else:
                    lhs, rhs = yest[name], west[name]
                out.append(_result(cid, lhs, rhs, ResultKind.ONE_SIDED, cfg.z_crit, echo))
    return out


def _drift_plan(cfg: SweepConfig, grid: TimeGrid, unit: float) -> Dict[str, FunctionalDescriptor]:
    """Descriptor plan for check_drift_comparison at one sweep point."""
    plan: Dict[str, FunctionalDescriptor] = {}
    for m in cfg.drifts:
        plan[f"plain/{m.describe()}"] = FunctionalDescriptor(
            base=Base.SUP_PLUS_DRIFT, drift=m
        )
    for m in cfg.drifts:
        for frac in cfg.anchor_fracs:
            idx = _anchor_index(grid, frac)
            for c in cfg.floor_levels:
                key = f"floor/{m.describe()}/s={frac!r}/c={c!r}"
                plan[key] = FunctionalDescriptor(
                    base=Base.SUP_DRIFT_MINUS_ANCHOR,
                    drift=m,
                    anchor_index=idx,
                    floor_c=c * unit,
                )
            anchor_time = grid.times_with_origin[idx]
            m_at_anchor = float(m.values(np.array([anchor_time]))[0])
            for name, tr, needs_nonneg in _convex_catalog(cfg, unit):
                if needs_nonneg and m_at_anchor < 0.0:
                    continue  # base value not guaranteed nonnegative
                key = f"convex/{m.describe()}/s={frac!r}/g={name}"
                plan[key] = FunctionalDescriptor(
                    base=Base.SUP_DRIFT_MINUS_ANCHOR,
                    drift=m,
                    anchor_index=idx,
                    transform=tr,
                )
    return plan


def check_drift_comparison(cfg: SweepConfig) -> List[CheckResult]:
    """Drifted-sup comparisons: plain, floored-anchored, convex-anchored."""
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        pid = _point_id("drift_comparison", h, k)
        unit = _pow(cfg.T, params.hk)
        ok1 = _gate(params, grid, Comparison.Y1)
        ok2 = _gate(params, grid, Comparison.Y2)
        plan = _drift_plan(cfg, grid, unit)

        west = None
        if ok1 or ok2:
            w = _sample_w(cfg, params, grid, pid + "/W")
            west = _estimates(w, plan)
            del w
        for which, ok, side in ((Comparison.Y1, ok1, "upper"), (Comparison.Y2, ok2, "lower")):
            yest = None
            if ok:
                y = _sample_y(cfg, params, grid, which, f"{pid}/{which.value}")
                yest = _estimates(y, plan)
                del y
            for key in plan:
                cid = f"{pid}/{key}/{side}"
                echo = _echo(cfg, "drift_comparison", h, k, side=side, functional=key)
                if not ok:
                    out.append(_gated(cid, ResultKind.ONE_SIDED, cfg.z_crit, echo))
                    continue
                if side == "upper":
                    lhs, rhs = west[key], yest[key]
                else:
                    lhs, rhs = yest[key], west[key]
                out.append(_result(cid, lhs, rhs, ResultKind.ONE_SIDED, cfg.z_crit, echo))
    return out


def _floor_tails_plan(cfg: SweepConfig, unit: float) -> Dict[str, FunctionalDescriptor]:
    """Descriptor plan for check_floor_and_tails at one sweep point."""
    plan: Dict[str, FunctionalDescriptor] = {}
    for m in cfg.drifts:
        for c in cfg.floor_levels:
            plan[f"maxc/{m.describe()}/c={c!r}"] = FunctionalDescriptor(
                base=Base.SUP_PLUS_DRIFT, drift=m, floor_c=c * unit
            )
    for m in cfg.drifts:
        m_at_origin = float(m.values(np.array([0.0]))[0])
        for name, tr, needs_nonneg in _convex_catalog(cfg, unit):
            if needs_nonneg and m_at_origin < 0.0:
                continue  # sup_t(X_t + m(t)) >= m(0) is the only guarantee
            plan[f"convex/{m.describe()}/g={name}"] = FunctionalDescriptor(
                base=Base.SUP_PLUS_DRIFT, drift=m, transform=tr
            )
    return plan


def check_floor_and_tails(cfg: SweepConfig) -> List[CheckResult]:
    """Floored drifted sups, convex drifted sups, and integrated tails.

    The integrated-tail estimates E(sup - t)_+ are also cross-checked per
    process against trapezoid quadrature of the empirical tail curve.
    """
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        pid = _point_id("floor_and_tails", h, k)
        unit = _pow(cfg.T, params.hk)
        ok1 = _gate(
            params, grid, Comparison.Y1,
            extra_ok=variance_domination(params, Comparison.Y1, grid),
        )
        ok2 = _gate(
            params, grid, Comparison.Y2,
            extra_ok=variance_domination(params, Comparison.Y2, grid),
        )
        plan = _floor_tails_plan(cfg, unit)
        t_abs = [t * unit for t in cfg.t_levels]
        hinge_descs = {
            f"tail/t={t!r}": FunctionalDescriptor(
                base=Base.SUP, transform=Transform.hinge(ta)
            )
            for t, ta in zip(cfg.t_levels, t_abs)
        }

        def eval_batch(batch):
            est = _estimates(batch, plan)
            est.update(_estimates(batch, hinge_descs))
            quads = {
                t: integrated_tail_quadrature(batch, ta)
                for t, ta in zip(cfg.t_levels, t_abs)
            }
            return est, quads

        west = quads_w = None
        if ok1 or ok2:
            w = _sample_w(cfg, params, grid, pid + "/W")
            west, quads_w = eval_batch(w)
            del w
        sides = ((Comparison.Y1, ok1, "upper"), (Comparison.Y2, ok2, "lower"))
        quad_jobs = [("W", west, quads_w, ok1 or ok2)]
        for which, ok, side in sides:
            yest = quads_y = None
            if ok:
                y = _sample_y(cfg, params, grid, which, f"{pid}/{which.value}")
                yest, quads_y = eval_batch(y)
                del y
            quad_jobs.append((which.value, yest, quads_y, ok))
            for key in list(plan) + list(hinge_descs):
                cid = f"{pid}/{key}/{side}"
                echo = _echo(cfg, "floor_and_tails", h, k, side=side, functional=key)
                if not ok:
                    out.append(_gated(cid, ResultKind.ONE_SIDED, cfg.z_crit, echo))
                    continue
                if side == "upper":
                    lhs, rhs = west[key], yest[key]
                else:
                    lhs, rhs = yest[key], west[key]
                out.append(_result(cid, lhs, rhs, ResultKind.ONE_SIDED, cfg.z_crit, echo))
        # hinge estimator vs quadrature of the empirical tail, per process
        for pname, est, quads, ok in quad_jobs:
            for t in cfg.t_levels:
                cid = f"{pid}/tail/t={t!r}/quadrature/{pname}"
                echo = _echo(cfg, "floor_and_tails", h, k, process=pname, t=t)
                if not ok:
                    out.append(_gated(cid, ResultKind.TWO_SIDED, 3.0, echo))
                    continue
                lhs = est[f"tail/t={t!r}"]
                rhs = MCEstimate.exact(quads[t], note="tail-curve quadrature")
                out.append(
                    _result(cid, lhs, rhs, ResultKind.TWO_SIDED, 3.0, echo, tol=1e-3)
                )
    return out


def check_exponential_concentration(cfg: SweepConfig) -> List[CheckResult]:
    """Exponential moment bound and Gaussian concentration of the sup.

    (i)  E exp(sup_t [W_t - t^{2HK}/2]) <= exp(E sup_t W_t), with the right
         side estimated on an independent batch (delta-method stderr).
    (ii) P(sup - Esup_hat >= a) <= exp(-a^2 / (2 T^{2HK})), with Esup_hat
         taken from one half of the batch and the tail frequency from the
         other half, so threshold and indicators are independent.
    """
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        pid = _point_id("exponential_concentration", h, k)
        unit = _pow(cfg.T, params.hk)

        wl = _sample_w(cfg, params, grid, pid + "/lhs")
        drift = DriftSpec(a=-0.5, b=2.0 * params.hk)
        lhs = mc_estimate(
            wl,
            FunctionalDescriptor(
                base=Base.SUP_PLUS_DRIFT, drift=drift, transform=Transform.exp(1.0)
            ),
        )
        del wl
        wr = _sample_w(cfg, params, grid, pid + "/rhs")
        sup_est = mc_estimate(wr, FunctionalDescriptor(base=Base.SUP))
        sups = np.array(functional_values(wr, FunctionalDescriptor(base=Base.SUP)))
        del wr

        exp_mean = math.exp(sup_est.mean)
        rhs = MCEstimate(
            mean=exp_mean,
            stderr=exp_mean * sup_est.stderr,
            M=sup_est.M,
            functional="exp(E sup)",
            process=sup_est.process,
            note="delta method",
        )
        echo = _echo(cfg, "exponential_concentration", h, k, part="exp_moment")
        out.append(
            _result(f"{pid}/exp_moment", lhs, rhs, ResultKind.ONE_SIDED, cfg.z_crit, echo)
        )

        half = sups.size // 2
        esup_hat = math.fsum(sups[:half]) / half
        tail = sups[half:]
        nb = tail.size
        for a in cfg.a_levels:
            a_abs = a * unit
            p_hat = float(np.count_nonzero(tail >= esup_hat + a_abs)) / nb
            se = math.sqrt(p_hat * (1.0 - p_hat) / nb)
            bound = math.exp(-(a_abs**2) / (2.0 * unit**2))
            cid = f"{pid}/concentration/a={a!r}"
            echo = _echo(cfg, "exponential_concentration", h, k, part="concentration", a=a)
            lhs_c = MCEstimate(
                mean=p_hat, stderr=se, M=nb,
                functional=f"P(sup - Esup_hat >= {a!r}*T^hk)",
                process=sup_est.process,
            )
            rhs_c = MCEstimate.exact(bound, note="Gaussian concentration bound")
            out.append(_result(cid, lhs_c, rhs_c, ResultKind.ONE_SIDED, 3.0, echo))
    return out


def check_reflection_symmetry(cfg: SweepConfig) -> List[CheckResult]:
    """Reflection tail bound and self-similar tail rescaling.

    (i)  P(sup |W| >= u) <= 2 P(sup W >= u), both sides from independent
         batches.
    (ii) P(sup_{[0,rT]} >= u) equals P(sup_{[0,T]} >= u r^{-HK}): exactly
         for stream-coupled batches (the Cholesky construction is exactly
         self-similar), statistically for independent ones.
    """
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        pid = _point_id("reflection_symmetry", h, k)
        unit = _pow(cfg.T, params.hk)
        sup_desc = FunctionalDescriptor(base=Base.SUP)

        wa = _sample_w(cfg, params, grid, pid + "/abs")
        supabs = np.array(
            functional_values(wa, FunctionalDescriptor(base=Base.SUP_ABS))
        )
        del wa
        ws = _sample_w(cfg, params, grid, pid + "/sup")
        sups = np.array(functional_values(ws, sup_desc))
        del ws
        m = sups.size

        for u in cfg.u_levels:
            u_abs = u * unit
            p_abs = float(np.count_nonzero(supabs >= u_abs)) / m
            p_sup = float(np.count_nonzero(sups >= u_abs)) / m
            lhs = MCEstimate(
                mean=p_abs,
                stderr=math.sqrt(p_abs * (1 - p_abs) / m),
                M=m,
                functional=f"P(sup|W| >= {u!r}*T^hk)",
            )
            rhs = MCEstimate(
                mean=2.0 * p_sup,
                stderr=2.0 * math.sqrt(p_sup * (1 - p_sup) / m),
                M=m,
                functional=f"2 P(sup W >= {u!r}*T^hk)",
            )
            echo = _echo(cfg, "reflection_symmetry", h, k, part="reflection", u=u)
            out.append(
                _result(f"{pid}/reflection/u={u!r}", lhs, rhs, ResultKind.ONE_SIDED, 3.0, echo)
            )

        coupled_master = fold_label(cfg.seed, pid + "/sup")
        for r in cfg.rescale_factors:
            rgrid = grid.scaled(r)
            runit = _pow(rgrid.T, params.hk)
            rfactor = cholesky_factor(gram_matrix(rgrid, params))
            coupled = sample_paths(rfactor, cfg.M, derive_stream(coupled_master, 0))
            sups_r = np.array(functional_values(coupled, sup_desc))
            del coupled
            ind = _sample_w(cfg, params, rgrid, f"{pid}/ind/r={r!r}")
            sups_r_ind = np.array(functional_values(ind, sup_desc))
            del ind
            rescale = float(_pow(r, -params.hk))
            for u in cfg.u_levels:
                u_big = u * runit
                u_small = u_big * rescale
                p_base = float(np.count_nonzero(sups >= u_small)) / m
                se_base = math.sqrt(p_base * (1 - p_base) / m)

                p_coupled = float(np.count_nonzero(sups_r >= u_big)) / m
                cid = f"{pid}/rescale/r={r!r}/u={u!r}/coupled"
                echo = _echo(
                    cfg, "reflection_symmetry", h, k, part="rescale",
                    r=r, u=u, mode="coupled",
                )
                lhs = MCEstimate(mean=p_coupled, stderr=0.0, M=m, note="coupled counts")
                rhs = MCEstimate(mean=p_base, stderr=0.0, M=m, note="coupled counts")
                out.append(_result(cid, lhs, rhs, ResultKind.EXACT, cfg.z_crit, echo, tol=0.0))

                p_ind = float(np.count_nonzero(sups_r_ind >= u_big)) / m
                se_ind = math.sqrt(p_ind * (1 - p_ind) / m)
                cid = f"{pid}/rescale/r={r!r}/u={u!r}/independent"
                echo = _echo(
                    cfg, "reflection_symmetry", h, k, part="rescale",
                    r=r, u=u, mode="independent",
                )
                lhs = MCEstimate(mean=p_ind, stderr=se_ind, M=m)
                rhs = MCEstimate(mean=p_base, stderr=se_base, M=m)
                out.append(_result(cid, lhs, rhs, ResultKind.TWO_SIDED, 3.0, echo))
    return out


def check_scaling(cfg: SweepConfig) -> List[CheckResult]:
    """Moment scaling E (sup|W|)^p = const * T^{p HK} across horizons.

    Stream-coupled batches make the ratio exact (tolerance 1e-8 relative);
    independent batches test it statistically at 3 combined stderr.
    """
    out: List[CheckResult] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        pid = _point_id("scaling", h, k)
        descs = {
            p: FunctionalDescriptor(base=Base.SUP_ABS, transform=(
                Transform.identity() if p == 1.0 else Transform.moment(p)
            ))
            for p in cfg.p_moments
        }

        def horizon_estimates(label_suffix: str, shared_master) -> list:
            per_horizon = []
            for t_h in cfg.horizons:
                grid = TimeGrid.uniform(cfg.n, t_h)
                if shared_master is None:
                    master = fold_label(cfg.seed, f"{pid}/{label_suffix}/T={t_h!r}")
                else:
                    master = shared_master
                factor = cholesky_factor(gram_matrix(grid, params))
                batch = sample_paths(factor, cfg.M, derive_stream(master, 0))
                per_horizon.append({p: mc_estimate(batch, d) for p, d in descs.items()})
                del batch
            return per_horizon

        coupled = horizon_estimates("coupled", fold_label(cfg.seed, pid + "/coupled"))
        independent = horizon_estimates("independent", None)

        for p in cfg.p_moments:
            for i in range(len(cfg.horizons)):
                for j in range(i + 1, len(cfg.horizons)):
                    ti, tj = cfg.horizons[i], cfg.horizons[j]
                    expected = float(_pow(tj / ti, p * params.hk))

                    est_i, est_j = coupled[i][p], coupled[j][p]
                    ratio = est_j.mean / est_i.mean
                    cid = f"{pid}/coupled/p={p!r}/T={ti!r}->{tj!r}"
                    echo = _echo(cfg, "scaling", h, k, mode="coupled", p=p, T_from=ti, T_to=tj)
                    lhs = MCEstimate(mean=ratio, stderr=0.0, M=est_i.M, note="coupled ratio")
                    rhs = MCEstimate.exact(expected, note="T^{p*HK} scaling")
                    out.append(
                        _result(cid, lhs, rhs, ResultKind.EXACT, cfg.z_crit, echo,
                                tol=1e-8 * expected)
                    )

                    est_i, est_j = independent[i][p], independent[j][p]
                    ratio = est_j.mean / est_i.mean
                    se = abs(ratio) * math.hypot(
                        est_i.stderr / est_i.mean, est_j.stderr / est_j.mean
                    )
                    cid = f"{pid}/independent/p={p!r}/T={ti!r}->{tj!r}"
                    echo = _echo(cfg, "scaling", h, k, mode="independent", p=p, T_from=ti, T_to=tj)
                    lhs = MCEstimate(mean=ratio, stderr=se, M=est_i.M, note="independent ratio")
                    rhs = MCEstimate.exact(expected, note="T^{p*HK} scaling")
                    out.append(_result(cid, lhs, rhs, ResultKind.TWO_SIDED, 3.0, echo))
    return out


def two_point_sandwich(
    H: float, K: float, t1: float, t2: float, M: int, seed: int, z_crit: float = 4.0
) -> List[CheckResult]:
    """Two-point grids, where E max(X_{t1}, X_{t2}) has a closed form.

    For a centered Gaussian pair, E max(X_1, X_2) = sqrt(Var(X_1 - X_2) / (2 pi)).
    Emits per-process agreement with the closed form (two-sided) and the
    closed-form ordering Y2 <= W <= Y1 (one-sided, exact values).
    """
    if not (0.0 < t1 < t2):
        raise ConfigError(f"need 0 < t1 < t2, got {t1}, {t2}")
    params = KernelParams.bifbm(H, K)
    grid = TimeGrid(T=t2, times=np.array([t1, t2]))
    pid = f"two_point/H={H!r},K={K!r}/t1={t1!r},t2={t2!r}"
    desc = FunctionalDescriptor(base=Base.SUP, exclude_origin=True)
    cfg_echo = {"check": "two_point", "H": H, "K": K, "t1": t1, "t2": t2, "M": M, "seed": seed}

    diff_var_w = float(increment_variance(t1, t2, params))
    closed = {"W": math.sqrt(diff_var_w / (2.0 * math.pi))}
    delta = float(_pow(t2 - t1, 2.0 * params.hk))
    for which in (Comparison.Y1, Comparison.Y2):
        s = comparison_scale(K, which)
        closed[which.value] = math.sqrt(s * s * delta / (2.0 * math.pi))

    out: List[CheckResult] = []
    ests = {}
    wfac = cholesky_factor(gram_matrix(grid, params))
    wb = sample_paths(wfac, M, derive_stream(fold_label(seed, pid + "/W"), 0))
    ests["W"] = mc_estimate(wb, desc)
    del wb
    yfac = cholesky_factor(gram_matrix(grid, KernelParams.fbm(params.hk)))
    for which in (Comparison.Y1, Comparison.Y2):
        yb = sample_paths(
            yfac, M, derive_stream(fold_label(seed, f"{pid}/{which.value}"), 0)
        )
        yb.values[:, 1:] *= comparison_scale(K, which)
        ests[which.value] = mc_estimate(yb, desc)
        del yb

    for pname in ("W", "Y1", "Y2"):
        out.append(
            _result(
                f"{pid}/closed_form/{pname}",
                ests[pname],
                MCEstimate.exact(closed[pname], note="E max closed form"),
                ResultKind.TWO_SIDED,
                z_crit,
                dict(cfg_echo, process=pname),
            )
        )
    # at K = 1 the upper pair coincides in law, so allow representation rounding
    round_tol = 1e-13 * closed["W"]
    out.append(
        _result(
            f"{pid}/ordering/upper",
            MCEstimate.exact(closed["W"]),
            MCEstimate.exact(closed["Y1"]),
            ResultKind.ONE_SIDED,
            z_crit,
            dict(cfg_echo, part="ordering"),
            tol=round_tol,
        )
    )
    out.append(
        _result(
            f"{pid}/ordering/lower",
            MCEstimate.exact(closed["Y2"]),
            MCEstimate.exact(closed["W"]),
            ResultKind.ONE_SIDED,
            z_crit,
            dict(cfg_echo, part="ordering"),
            tol=round_tol,
        )
    )
    return out


def refinement_rows(cfg: SweepConfig) -> List[dict]:
    """E sup W against nested grid resolutions, from one batch per sweep point.

    Coarser estimates reuse column subsets of the fine batch, so the sup
    means are nondecreasing in n path-by-path, not just in expectation.
    """
    from .estimators import _mean_stderr  # shared compensated-summation helper

    rows: List[dict] = []
    sub_ns = []
    for divisor in (8, 4, 2, 1):
        sub = cfg.n // divisor
        if sub >= 2 and cfg.n % sub == 0 and sub not in sub_ns:
            sub_ns.append(sub)
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        master = fold_label(cfg.seed, _point_id("refinement", h, k))
        factor = cholesky_factor(gram_matrix(grid, params))
        batch = sample_paths(factor, cfg.M, derive_stream(master, 0))
        for sub in sub_ns:
            step = cfg.n // sub
            sups = np.empty(batch.M)
            for r in range(0, batch.M, 16384):
                sups[r : r + 16384] = batch.values[r : r + 16384, ::step].max(axis=1)
            mean, se = _mean_stderr(sups)
            rows.append({"H": h, "K": k, "n": sub, "mean": mean, "stderr": se})
        del batch
    return rows


def tail_curve_rows(cfg: SweepConfig, points: int) -> List[dict]:
    """Empirical tail curves P(sup W >= u) on u in [0, 3 T^{HK}] per sweep point."""
    from .estimators import tail_curve

    rows: List[dict] = []
    for h, k in cfg.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.n, cfg.T)
        batch = _sample_w(cfg, params, grid, _point_id("tail_curve", h, k))
        levels = np.linspace(0.0, 3.0 * _pow(cfg.T, params.hk), points)
        for u, p_hat, se in tail_curve(batch, levels):
            rows.append(
                {"process": batch.label.describe(), "H": h, "K": k,
                 "u": float(u), "p_hat": float(p_hat), "stderr": float(se)}
            )
        del batch
    return rows


CHECKS: Dict[str, Callable[[SweepConfig], List[CheckResult]]] = {
    "scaling": check_scaling,
    "sup_sandwich": check_sup_sandwich,
    "increment_convex": check_increment_convex,
    "drift_comparison": check_drift_comparison,
    "floor_and_tails": check_floor_and_tails,
    "exponential_concentration": check_exponential_concentration,
    "reflection_symmetry": check_reflection_symmetry,
}
