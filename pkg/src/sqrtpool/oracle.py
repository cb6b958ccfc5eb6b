"""Brute-force cross-checks for the kernels and the eigen-solver.

:func:`fisher_direct` integrates the pooled density directly and never
touches the Gram matrices.  The searches only evaluate the Rayleigh
quotient; they precondition with the eigenbasis of B (a change of
variables, which leaves the searched values unchanged) but never form
``B^{-1/2} A B^{-1/2}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import Panel
from .errors import DegenerateDirection
from .kernels import GramPair
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, quad_inner

__all__ = ["SearchConfig", "fisher_direct", "search_alpha", "search_alpha_nonneg"]


@dataclass(frozen=True)
class SearchConfig:
    n_restarts: int = 64
    n_iterations: int = 2000
    step_decay: float = 0.97
    seed: int = 0

    def __post_init__(self):
        if self.n_restarts < 1 or self.n_iterations < 1:
            raise ValueError("n_restarts and n_iterations must be positive")
        if not 0 < self.step_decay < 1:
            raise ValueError("step_decay must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def _panel_region(panel: Panel):
    pts = [d.breakpoints() for d in panel.experts]
    # support ends of individual experts are kinks of the pooled function
    ends = [v for d in panel.experts for v in d.support() if np.isfinite(v)]
    return panel.support(), np.concatenate(pts + [np.asarray(ends, dtype=float)])


def fisher_direct(panel: Panel, alpha, cfg: QuadratureConfig | None = None) -> float:
    """Fisher information of ``f = (alpha . psi)^2 / ||alpha . psi||^2`` by direct quadrature.

    Uses ``(f')^2 / f = 4 (alpha . psi')^2 / ||alpha . psi||^2``, which is
    finite where ``f`` vanishes.  The normalising constant is integrated
    independently rather than read off B.
    """
    cfg = cfg or DEFAULT_CONFIG
    alpha = np.asarray(alpha, dtype=float)
    region, pts = _panel_region(panel)

    def sq(x):
        s = alpha @ panel.sqrt_matrix(x)
        return s * s

    def dsq(x):
        s = alpha @ panel.sqrt_deriv_matrix(x)
        return 4.0 * s * s

    norm = quad_inner(sq, region, cfg, points=pts)
    if not norm > 1e-10:
        raise DegenerateDirection(f"||alpha . psi||^2 = {norm:.3g}")
    return quad_inner(dsq, region, cfg, points=pts) / norm


def _search(g: GramPair, sc: SearchConfig, nonneg: bool):
    a, b = g.a, g.b
    m = a.shape[0]
    if m == 1:
        alpha = np.array([1.0 / np.sqrt(b[0, 0])])
        return alpha, 4.0 * a[0, 0] / b[0, 0]

    rng = np.random.default_rng(sc.seed)
    floor = 1e-14

    # search in coordinates where the constraint surface is close to a sphere;
    # directions B annihilates are left unscaled so rounding there is not amplified
    w, o = np.linalg.eigh(0.5 * (b + b.T))
    keep = w > 1e-10 * w[-1]
    wmat = o * np.where(keep, 1.0 / np.sqrt(np.where(keep, w, 1.0)), 1.0)
    a_w = wmat.T @ a @ wmat
    b_w = wmat.T @ b @ wmat
    nonneg_w = np.linalg.inv(wmat) if nonneg else None

    def quad_forms(u):
        return np.einsum("ri,ij,rj->r", u, a_w, u), np.einsum("ri,ij,rj->r", u, b_w, u)

    def project(z):
        # clip in alpha coordinates, map back to search coordinates
        if not nonneg:
            return z
        return np.maximum(z @ wmat.T, 0.0) @ nonneg_w.T

    def draw(n):
        z = rng.standard_normal((n, m))
        return np.abs(z) @ nonneg_w.T if nonneg else z

    u = draw(sc.n_restarts)
    num, den = quad_forms(u)
    while np.any(den <= floor):
        bad = den <= floor
        u[bad] = draw(int(bad.sum()))
        num, den = quad_forms(u)
    u = u / np.sqrt(den)[:, None]
    val = 4.0 * num / den
    step = np.full(sc.n_restarts, 0.5)
    grow = 1.0 / sc.step_decay**3
    for _ in range(sc.n_iterations):
        prop = project(u + step[:, None] * rng.standard_normal(u.shape))
        pn, pd = quad_forms(prop)
        ok = pd > floor
        pv = np.where(ok, 4.0 * pn / np.where(ok, pd, 1.0), np.inf)
        better = pv < val
        u[better] = prop[better] / np.sqrt(pd[better])[:, None]
        val[better] = pv[better]
        step = np.where(better, step * grow, step * sc.step_decay)
        step = np.maximum(step, 1e-12)
    best = int(np.argmin(val))
    alpha = wmat @ u[best]
    if nonneg:
        alpha = np.maximum(alpha, 0.0)
    return alpha / np.sqrt(float(alpha @ b @ alpha)), float(val[best])


def search_alpha(panel: Panel, g: GramPair, sc: SearchConfig | None = None) -> tuple[np.ndarray, float]:
    """Random-restart descent for ``min rayleigh(g, alpha)`` over ``alpha'B alpha = 1``.

    Each restart perturbs its current point with Gaussian steps, accepts
    improvements, and shrinks the step by ``step_decay`` after a rejection
    (it grows after a success).  Deterministic for a given seed.
    """
    if len(panel) != g.m:
        raise ValueError("panel and Gram pair sizes differ")
    return _search(g, sc or SearchConfig(), nonneg=False)


def search_alpha_nonneg(panel: Panel, g: GramPair, sc: SearchConfig | None = None) -> tuple[np.ndarray, float]:
    """As :func:`search_alpha`, restricted to ``alpha >= 0`` by clipping each proposal."""
    if len(panel) != g.m:
        raise ValueError("panel and Gram pair sizes differ")
    return _search(g, sc or SearchConfig(), nonneg=True)
