import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bifbmlab import (
    Comparison,
    DomainError,
    KernelParams,
    NotPositiveSemidefinite,
    TimeGrid,
    bifbm_cov,
    comparison_scale,
    fbm_cov,
    gram_matrix,
    increment_bounds,
    increment_variance,
    kernel_cov,
    psd_check,
    variance_domination,
)

# frozen reference values, computed independently at 30-digit precision
FBM_COV_1_4_H075 = 1.90192378864668406
BIFBM_COV_1_4 = 0.356393958692600617  # H = K = 0.5
INCVAR_1_4 = 2.28721208261479877  # H = K = 0.5
INC_BOUNDS_1_4 = (1.22474487139158905, 2.44948974278317810)
MIN_EIG_B12 = 0.381966011250105152  # [[1,1],[1,2]]

REL = 1e-12


def rel_close(value, expected, rel=REL):
    return abs(value - expected) <= rel * (1.0 + abs(expected))


def test_fbm_cov_values():
    assert rel_close(fbm_cov(1.0, 2.0, 0.5), 1.0)  # Brownian: min(s, t)
    assert rel_close(fbm_cov(3.0, 2.0, 0.5), 2.0)
    assert rel_close(fbm_cov(1.0, 4.0, 0.75), FBM_COV_1_4_H075)
    assert fbm_cov(0.0, 4.0, 0.75) == 0.0
    assert rel_close(fbm_cov(2.0, 2.0, 0.3), 2.0**0.6)


def test_bifbm_cov_values():
    p = KernelParams.bifbm(0.5, 0.5)
    assert rel_close(bifbm_cov(1.0, 4.0, p), BIFBM_COV_1_4)
    # K = 1 reduces to fBm exactly (within power-evaluation roundoff)
    for h in (0.25, 0.5, 0.75):
        p1 = KernelParams.bifbm(h, 1.0)
        for s, t in ((1.0, 2.0), (0.5, 3.0), (2.0, 2.0)):
            assert rel_close(bifbm_cov(s, t, p1), fbm_cov(s, t, h))


def test_bifbm_cov_at_origin():
    p = KernelParams.bifbm(0.6, 0.8)
    assert bifbm_cov(0.0, 0.0, p) == 0.0
    assert abs(bifbm_cov(0.0, 1.7, p)) <= 1e-14


def test_diagonal_is_power_law():
    for h, k in ((0.25, 0.5), (0.5, 1.0), (0.75, 0.75), (0.4, 1.5)):
        p = KernelParams.bifbm(h, k)
        for t in (0.3, 1.0, 2.5, 10.0):
            assert rel_close(bifbm_cov(t, t, p), t ** (2 * h * k))


def test_kernel_cov_dispatch():
    pf = KernelParams.fbm(0.7)
    pb = KernelParams.bifbm(0.7, 1.0)
    assert kernel_cov(1.0, 2.0, pf) == fbm_cov(1.0, 2.0, 0.7)
    assert rel_close(kernel_cov(1.0, 2.0, pb), fbm_cov(1.0, 2.0, 0.7))


def test_increment_variance():
    p = KernelParams.bifbm(0.5, 0.5)
    assert increment_variance(2.0, 2.0, p) == 0.0
    assert rel_close(increment_variance(1.0, 4.0, p), INCVAR_1_4)
    # Brownian case: |t - s|
    pb = KernelParams.bifbm(0.5, 1.0)
    assert rel_close(increment_variance(1.0, 4.0, pb), 3.0)
    # symmetric in (s, t)
    assert increment_variance(4.0, 1.0, p) == increment_variance(1.0, 4.0, p)


def test_increment_bounds():
    p = KernelParams.bifbm(0.5, 0.5)
    lo, hi = increment_bounds(1.0, 4.0, p)
    assert rel_close(lo, INC_BOUNDS_1_4[0])
    assert rel_close(hi, INC_BOUNDS_1_4[1])
    assert hi == 2.0 * lo  # exact by construction
    assert lo <= increment_variance(1.0, 4.0, p) <= hi
    z = increment_bounds(3.0, 3.0, p)
    assert z == (0.0, 0.0)
    # K = 1: upper bound equals the fBm increment variance
    p1 = KernelParams.bifbm(0.3, 1.0)
    lo, hi = increment_bounds(1.0, 2.0, p1)
    assert rel_close(hi, increment_variance(1.0, 2.0, p1))


def test_increment_sandwich_on_lattice():
    # the pinch holds pointwise on a time lattice for K <= 1
    ts = TimeGrid.uniform(16, 2.0).times_with_origin
    for h in (0.2, 0.5, 0.8):
        for k in (0.3, 0.7, 1.0):
            p = KernelParams.bifbm(h, k)
            s, t = np.meshgrid(ts, ts, indexing="ij")
            v = increment_variance(s, t, p)
            lo, hi = increment_bounds(s, t, p)
            assert np.all(v >= lo - 1e-10)
            assert np.all(v <= hi + 1e-10)


def test_gram_matrix_examples():
    for h, k in ((0.6, 0.5), (0.25, 1.0)):
        g = gram_matrix(TimeGrid(T=1.0, times=np.array([1.0])), KernelParams.bifbm(h, k))
        assert g.values.shape == (1, 1)
        assert rel_close(g.values[0, 0], 1.0)
    g = gram_matrix(TimeGrid(T=2.0, times=np.array([1.0, 2.0])), KernelParams.fbm(0.5))
    np.testing.assert_allclose(g.values, [[1.0, 1.0], [1.0, 2.0]], rtol=REL)
    p = KernelParams.bifbm(0.5, 0.5)
    g = gram_matrix(TimeGrid(T=4.0, times=np.array([1.0, 4.0])), p)
    assert rel_close(g.values[0, 1], BIFBM_COV_1_4)
    assert rel_close(g.values[0, 0], 1.0)
    assert rel_close(g.values[1, 1], 2.0)


def test_gram_matrix_is_exactly_symmetric():
    grid = TimeGrid.uniform(64, 1.5)
    g = gram_matrix(grid, KernelParams.bifbm(0.7, 0.6))
    assert np.array_equal(g.values, g.values.T)


def test_psd_check():
    g = gram_matrix(TimeGrid(T=2.0, times=np.array([1.0, 2.0])), KernelParams.fbm(0.5))
    assert rel_close(psd_check(g), MIN_EIG_B12)
    assert rel_close(g.min_eig, MIN_EIG_B12)

    g.values = np.eye(3)
    assert psd_check(g) == 1.0

    g.values = np.array([[1.0, 2.0], [2.0, 1.0]])  # min eig -1
    with pytest.raises(NotPositiveSemidefinite):
        psd_check(g)


def test_bifbm_grams_are_psd_up_to_512():
    grid = TimeGrid.uniform(512, 1.0)
    for h, k in ((0.25, 0.5), (0.75, 1.0), (0.5, 0.75)):
        g = gram_matrix(grid, KernelParams.bifbm(h, k))
        assert psd_check(g) >= -1e-8 * np.max(np.diag(g.values))


def test_extended_regime_psd_gate_runs():
    # K > 1 grams are gated at construction; this one passes and records min_eig
    g = gram_matrix(TimeGrid.uniform(64, 1.0), KernelParams.bifbm(0.4, 1.5))
    assert g.min_eig is not None
    assert g.min_eig >= -1e-8


def test_comparison_scales():
    assert comparison_scale(1.0, Comparison.Y1) == 1.0
    assert rel_close(comparison_scale(1.0, Comparison.Y2), 2.0**-0.5)
    assert rel_close(comparison_scale(0.5, Comparison.Y1), 2.0**0.25)


def test_variance_domination():
    grid = TimeGrid.uniform(32, 1.0)
    for k in (0.5, 0.75, 1.0):
        p = KernelParams.bifbm(0.5, k)
        assert variance_domination(p, Comparison.Y1, grid)
        assert variance_domination(p, Comparison.Y2, grid)
    # K > 1: the Y1 variance bound fails (2^{1-K} < 1)
    p = KernelParams.bifbm(0.4, 1.5)
    assert not variance_domination(p, Comparison.Y1, grid)
    assert variance_domination(p, Comparison.Y2, grid)


def test_parameter_validation():
    with pytest.raises(DomainError):
        KernelParams.bifbm(0.0, 0.5)
    with pytest.raises(DomainError):
        KernelParams.bifbm(1.0, 0.5)
    with pytest.raises(DomainError):
        KernelParams.bifbm(0.5, 0.0)
    with pytest.raises(DomainError):
        KernelParams.bifbm(0.5, 2.0)
    with pytest.raises(DomainError):
        KernelParams.bifbm(0.8, 1.5)  # H*K >= 1 in the extended regime
    KernelParams.bifbm(0.6, 1.5)  # H*K = 0.9 < 1 is fine
    with pytest.raises(DomainError):
        KernelParams(kind=KernelParams.fbm(0.5).kind, H=0.5, K=0.7)  # fBm forces K=1


def test_domain_errors_on_bad_times():
    p = KernelParams.bifbm(0.5, 0.5)
    with pytest.raises(DomainError):
        fbm_cov(-1.0, 2.0, 0.5)
    with pytest.raises(DomainError):
        bifbm_cov(1.0, -2.0, p)
    with pytest.raises(DomainError):
        fbm_cov(1.0, 2.0, 1.5)


@given(
    s=st.floats(0.0, 50.0),
    t=st.floats(0.0, 50.0),
    h=st.floats(0.05, 0.95),
    k=st.floats(0.05, 1.0),
)
@settings(max_examples=200, deadline=None)
def test_cov_symmetry_is_bitwise(s, t, h, k):
    p = KernelParams.bifbm(h, k)
    assert bifbm_cov(s, t, p) == bifbm_cov(t, s, p)


@given(
    s=st.floats(0.001, 20.0),
    t=st.floats(0.001, 20.0),
    h=st.floats(0.05, 0.95),
)
@settings(max_examples=200, deadline=None)
def test_k1_reduction_property(s, t, h):
    p = KernelParams.bifbm(h, 1.0)
    a, b = bifbm_cov(s, t, p), fbm_cov(s, t, h)
    assert abs(a - b) <= 1e-12 * (1.0 + abs(b))


@given(
    s=st.floats(0.0, 20.0),
    t=st.floats(0.0, 20.0),
    h=st.floats(0.05, 0.95),
    k=st.floats(0.05, 1.0),
)
@settings(max_examples=200, deadline=None)
def test_increment_pinch_property(s, t, k, h):
    p = KernelParams.bifbm(h, k)
    v = increment_variance(s, t, p)
    lo, hi = increment_bounds(s, t, p)
    slack = 1e-10 * (1.0 + hi)
    assert lo - slack <= v <= hi + slack
