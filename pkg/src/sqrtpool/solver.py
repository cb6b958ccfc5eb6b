"""Minimisation of the generalised Rayleigh quotient ``alpha'A alpha / alpha'B alpha``.

With ``B = O diag(d) O'``, the minimum over ``alpha`` is the smallest
eigenvalue of ``B^{-1/2} A B^{-1/2}`` and the minimiser is
``B^{-1/2} v`` for its unit eigenvector ``v``.  When ``B`` is singular the
pencil is restricted to the range of ``B``; this loses nothing because
every null vector of ``B`` is also a null vector of ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, DegenerateGram, SingularTransform
from .kernels import GramPair

__all__ = [
    "PoolingSolution",
    "RankReduction",
    "min_rayleigh",
    "reduce_rank",
    "rayleigh",
    "basis_transform",
]

RANK_TOL = 1e-10
MULTIPLICITY_TOL = 1e-8


@dataclass(frozen=True)
class PoolingSolution:
    alpha: np.ndarray
    lambda_min: float
    information: float
    effective_rank: int
    used_reduction: bool
    multiplicity_warning: bool


@dataclass(frozen=True)
class RankReduction:
    r: int
    retained_eigenvalues: np.ndarray
    retained_basis: np.ndarray
    reduced_a: np.ndarray


def _sym(mat):
    return 0.5 * (mat + mat.T)


def _eig_b(b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, o = np.linalg.eigh(_sym(b))
    if w[-1] <= 0 or not np.isfinite(w[-1]):
        raise DegenerateGram("B is numerically zero")
    return w, o


def reduce_rank(g: GramPair, rank_tol: float = RANK_TOL) -> RankReduction:
    """Project the pencil onto the eigenvectors of B with ``delta > rank_tol * delta_max``."""
    w, o = _eig_b(g.b)
    keep = w > rank_tol * w[-1]
    o1 = o[:, keep]
    return RankReduction(
        r=int(keep.sum()),
        retained_eigenvalues=w[keep],
        retained_basis=o1,
        reduced_a=_sym(o1.T @ g.a @ o1),
    )


def _fix_sign(alpha: np.ndarray, b: np.ndarray) -> np.ndarray:
    overlap = float(np.sum(b @ alpha))
    if abs(overlap) > 1e-14 * max(1.0, float(np.abs(alpha).max())):
        return -alpha if overlap < 0 else alpha
    nz = np.flatnonzero(alpha)
    if nz.size and alpha[nz[0]] < 0:
        return -alpha
    return alpha


def _smallest(c: np.ndarray) -> tuple[float, np.ndarray, bool]:
    lam, vec = np.linalg.eigh(_sym(c))
    tie = False
    if lam.size > 1:
        gap = lam[1] - lam[0]
        tie = bool(gap <= MULTIPLICITY_TOL * max(abs(lam[0]), abs(lam[1])) or gap == 0)
    return float(lam[0]), vec[:, 0], tie


def min_rayleigh(g: GramPair, rank_tol: float = RANK_TOL) -> PoolingSolution:
    """Optimal weights for the pencil ``(A, B)``.

    The returned ``alpha`` satisfies ``alpha' B alpha = 1`` and the sign
    convention ``sum(B alpha) > 0``.  ``multiplicity_warning`` is set when
    the two smallest eigenvalues agree to 1e-8 relative, in which case the
    minimiser is not unique and the first eigenvector LAPACK reports is used.

    Raises
    ------
    DegenerateGram
        If B has no eigenvalue above zero.
    """
    a, b = g.a, g.b
    w, o = _eig_b(b)
    full = w[0] > rank_tol * w[-1]
    if full:
        b_inv_half = (o / np.sqrt(w)) @ o.T
        lam, v, tie = _smallest(b_inv_half @ a @ b_inv_half)
        alpha = b_inv_half @ v
        r = len(w)
    else:
        red = reduce_rank(g, rank_tol)
        scale = 1.0 / np.sqrt(red.retained_eigenvalues)
        c = scale[:, None] * red.reduced_a * scale[None, :]
        lam, v, tie = _smallest(c)
        alpha = red.retained_basis @ (scale * v)
        r = red.r
    alpha = alpha / np.sqrt(float(alpha @ b @ alpha))
    alpha = _fix_sign(alpha, b)
    lam = max(lam, 0.0)
    return PoolingSolution(
        alpha=alpha,
        lambda_min=lam,
        information=4.0 * lam,
        effective_rank=r,
        used_reduction=not full,
        multiplicity_warning=tie,
    )


def rayleigh(g: GramPair, alpha) -> float:
    """Fisher information ``4 alpha'A alpha / alpha'B alpha`` of the pooled density.

    Raises
    ------
    DegenerateDirection
        If ``alpha' B alpha <= 1e-14``.
    """
    alpha = np.asarray(alpha, dtype=float)
    den = float(alpha @ g.b @ alpha)
    if not den > 1e-14:
        raise DegenerateDirection(f"alpha'B alpha = {den:.3g}: direction lies (nearly) in Null(B)")
    return 4.0 * float(alpha @ g.a @ alpha) / den


def basis_transform(g: GramPair, r_matrix) -> GramPair:
    """Gram pair of the basis ``R psi``: ``(R A R', R B R')``.

    Minimising over the new basis gives the same information; weights map
    back through ``alpha = R' alpha_tilde``.
    """
    r = np.asarray(r_matrix, dtype=float)
    if r.shape != g.a.shape:
        raise SingularTransform(f"transform has shape {r.shape}, expected {g.a.shape}")
    cond = np.linalg.cond(r)
    if not cond < 1e12:
        raise SingularTransform(f"transform is singular (condition number {cond:.3g})")
    return GramPair(_sym(r @ g.a @ r.T), _sym(r @ g.b @ r.T))
