import numpy as np
import pytest

from bifbmlab import DomainError, TimeGrid


def test_uniform_grid_basics():
    g = TimeGrid.uniform(4, 2.0)
    assert g.n == 4
    np.testing.assert_allclose(g.times, [0.5, 1.0, 1.5, 2.0])
    assert g.times[-1] == 2.0
    assert g.is_uniform
    np.testing.assert_array_equal(g.times_with_origin[:1], [0.0])
    assert g.times_with_origin.size == 5


def test_uniform_last_point_exact():
    # T/n * n can round; the constructor must still end exactly at T
    for n in (3, 7, 48, 512):
        g = TimeGrid.uniform(n, 0.1)
        assert g.times[-1] == 0.1


def test_explicit_grid_validation():
    TimeGrid(T=1.0, times=np.array([0.25, 1.0]))  # fine
    with pytest.raises(DomainError):
        TimeGrid(T=1.0, times=np.array([0.0, 1.0]))  # origin excluded
    with pytest.raises(DomainError):
        TimeGrid(T=1.0, times=np.array([0.5, 0.5, 1.0]))  # not increasing
    with pytest.raises(DomainError):
        TimeGrid(T=1.0, times=np.array([0.5, 0.9]))  # last != T
    with pytest.raises(DomainError):
        TimeGrid(T=-1.0, times=np.array([-1.0]))
    with pytest.raises(DomainError):
        TimeGrid(T=1.0, times=np.array([[0.5, 1.0]]))


def test_scaled_grid():
    g = TimeGrid.uniform(8, 1.0)
    s = g.scaled(2.0)
    assert s.T == 2.0
    np.testing.assert_array_equal(s.times, g.times * 2.0)
    with pytest.raises(DomainError):
        g.scaled(0.0)


def test_coarsened_grid():
    g = TimeGrid.uniform(8, 1.0)
    c = g.coarsened(4)
    assert c.n == 2
    np.testing.assert_array_equal(c.times, [0.5, 1.0])
    with pytest.raises(DomainError):
        g.coarsened(3)  # does not divide n


def test_nonuniform_is_detected():
    g = TimeGrid(T=1.0, times=np.array([0.3, 1.0]))
    assert not g.is_uniform
