import numpy as np
import pytest

from sqrtpool import (
    DegenerateDirection,
    Exponential,
    GramPair,
    Normal,
    Panel,
    SearchConfig,
    fisher_direct,
    gram,
    min_rayleigh,
    rayleigh,
    search_alpha,
    search_alpha_nonneg,
)


@pytest.mark.parametrize("sigma", [0.3, 1.0, 2.5])
def test_fisher_direct_normal(sigma):
    assert fisher_direct(Panel((Normal(1, sigma),)), [1.0]) == pytest.approx(1 / sigma**2, abs=1e-8)


@pytest.mark.parametrize("rate", [0.5, 1.0, 3.0])
def test_fisher_direct_exponential(rate):
    assert fisher_direct(Panel((Exponential(rate),)), [1.0]) == pytest.approx(rate**2, abs=1e-8)


def test_fisher_direct_matches_solver(two_normal_panel):
    g = gram(two_normal_panel)
    sol = min_rayleigh(g)
    assert fisher_direct(two_normal_panel, sol.alpha) == pytest.approx(sol.information, rel=1e-6)
    alpha = np.array([1.0, -0.7])
    assert fisher_direct(two_normal_panel, alpha) == pytest.approx(rayleigh(g, alpha), rel=1e-6)


def test_fisher_direct_rejects_null_direction():
    with pytest.raises(DegenerateDirection):
        fisher_direct(Panel((Normal(0, 1), Normal(0, 1))), [1.0, -1.0])


def test_search_two_normals(two_normal_panel):
    g = gram(two_normal_panel)
    info = min_rayleigh(g).information
    _, val = search_alpha(two_normal_panel, g, SearchConfig(seed=1))
    assert info - 1e-9 * info <= val <= info * (1 + 1e-6)
    alpha, val_nn = search_alpha_nonneg(two_normal_panel, g, SearchConfig(seed=1))
    assert np.all(alpha >= 0)
    assert val_nn == pytest.approx(info, rel=1e-6)


def test_search_singleton():
    p = Panel((Normal(0, 1),))
    g = gram(p)
    for search in (search_alpha, search_alpha_nonneg):
        alpha, val = search(p, g)
        np.testing.assert_array_equal(alpha, [1.0])
        assert val == pytest.approx(1.0)


def test_search_isotropic():
    p = Panel((Normal(0, 1), Normal(1, 1), Normal(2, 1)))
    _, val = search_alpha(p, GramPair(np.eye(3), np.eye(3)))
    assert val == pytest.approx(4.0, abs=1e-9)


def test_nonneg_strictly_worse_when_optimum_has_negative_weight():
    p = Panel((Normal(0, 1), Normal(0, 2)))
    g = gram(p)
    sol = min_rayleigh(g)
    assert sol.alpha.min() < 0
    _, val = search_alpha_nonneg(p, g, SearchConfig(seed=3))
    assert val > sol.information + 1e-3


def test_search_reproducible(two_normal_panel):
    g = gram(two_normal_panel)
    a1, v1 = search_alpha(two_normal_panel, g, SearchConfig(seed=5, n_iterations=300))
    a2, v2 = search_alpha(two_normal_panel, g, SearchConfig(seed=5, n_iterations=300))
    assert np.array_equal(a1, a2) and v1 == v2


def test_search_size_mismatch(two_normal_panel):
    with pytest.raises(ValueError):
        search_alpha(two_normal_panel, GramPair(np.eye(3), np.eye(3)))


@pytest.mark.parametrize("kwargs", [{"n_restarts": 0}, {"n_iterations": 0}, {"step_decay": 1.0}, {"seed": -1}])
def test_search_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)
