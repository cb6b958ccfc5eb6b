"""Gram matrices of square-root densities.

``B[i, j] = <psi_i, psi_j>`` (the Bhattacharyya coefficient) and
``A[i, j] = <psi_i', psi_j'>``, so that ``4 * A[i, i]`` is the Fisher
information of expert ``i``.

Same-family pairs of normal, beta, gamma and exponential densities use
closed forms; everything else is integrated with :func:`quad_inner`.
Exponentials are handled as gammas with shape 1.  Log-normal pairs get the
normal closed form for ``B`` (the overlap is invariant under ``x = e^y``) and
quadrature for ``A``.

Notes on the closed forms, all re-derived and checked against quadrature
in the test suite:

* normal ``B``: the leading factor is ``sqrt(2 / (s * sigma_i * sigma_j))``
  with ``s = 1/sigma_i^2 + 1/sigma_j^2``; this is what makes ``B[i, i] = 1``.
* beta ``A``: differentiating ``(1 - x)^((b - 1)/2)`` gives a negative sign,
  so both mixed ``B(s - 1, t - 1)`` terms enter with a minus.
* exponential: ``psi = sqrt(rate) exp(-rate x / 2)``, giving
  ``B = 2 sqrt(r_i r_j) / (r_i + r_j)`` and ``A[i, i] = rate^2 / 4``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import special

from .densities import Beta, Density, Exponential, Gamma, LogNormal, Normal, Panel, overlap
from .errors import Cancelled, DisjointSupports, InfiniteInformation, PoolingError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, quad_inner

__all__ = [
    "Provenance",
    "GramPair",
    "b_entry",
    "a_entry",
    "gram",
    "quad_inner",
    "QuadratureConfig",
    "write_gram",
    "read_gram",
]


class Provenance(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class GramPair:
    a: np.ndarray
    b: np.ndarray
    provenance: np.ndarray | None = None
    warnings: tuple = field(default=())

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.ndim != 2 or a.shape != b.shape or a.shape[0] != a.shape[1]:
            raise ValueError("A and B must be square matrices of the same shape")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    def is_psd(self, rel_tol: float = 1e-10) -> tuple[bool, bool]:
        """Whether A and B pass ``min eig >= -rel_tol * max eig``."""
        return tuple(_psd(mat, rel_tol) for mat in (self.a, self.b))


def _psd(mat: np.ndarray, rel_tol: float) -> bool:
    w = np.linalg.eigvalsh(mat)
    return bool(w[0] >= -rel_tol * max(w[-1], 0.0))


# -- closed forms -------------------------------------------------------------


def _as_closed_family(d: Density) -> Density:
    return d.as_gamma() if isinstance(d, Exponential) else d


def _normal_log_b(mi, si, mj, sj):
    v = si * si + sj * sj
    return 0.5 * math.log(2 * si * sj / v) - (mi - mj) ** 2 / (4 * v)


def _normal_a(di: Normal, dj: Normal) -> float:
    mi, si, mj, sj = di.mu, di.sigma, dj.mu, dj.sigma
    # psi_i psi_j is B times a normal with this mean and variance
    v = 2 * si * si * sj * sj / (si * si + sj * sj)
    m = (mi * sj * sj + mj * si * si) / (si * si + sj * sj)
    second = v + (m - mi) * (m - mj)
    return math.exp(_normal_log_b(mi, si, mj, sj)) * second / (4 * si * si * sj * sj)


def _gamma_log_c(di: Gamma, dj: Gamma) -> float:
    return (
        0.5 * di.shape * math.log(di.rate)
        + 0.5 * dj.shape * math.log(dj.rate)
        - 0.5 * (special.gammaln(di.shape) + special.gammaln(dj.shape))
    )


def _gamma_b(di: Gamma, dj: Gamma) -> float:
    s = 0.5 * (di.shape + dj.shape)
    r = 0.5 * (di.rate + dj.rate)
    return math.exp(_gamma_log_c(di, dj) + special.gammaln(s) - s * math.log(r))


def _gamma_a(di: Gamma, dj: Gamma) -> float:
    ai, bi, aj, bj = di.shape, di.rate, dj.shape, dj.rate
    s = 0.5 * (ai + aj)
    r = 0.5 * (bi + bj)
    logc = _gamma_log_c(di, dj)
    terms = [
        ((ai - 1) * (aj - 1) / 4, 2),
        (-((ai - 1) * bj + (aj - 1) * bi) / 4, 1),
        (bi * bj / 4, 0),
    ]
    total = 0.0
    for coef, k in terms:
        if coef == 0:
            continue
        if s - k <= 0:
            raise InfiniteInformation(f"<psi', psi'> diverges for {di} and {dj} (Gamma({s - k:g}) term)")
        total += coef * math.exp(logc + special.gammaln(s - k) - (s - k) * math.log(r))
    return total


def _beta_b(di: Beta, dj: Beta) -> float:
    s, t = 0.5 * (di.a + dj.a), 0.5 * (di.b + dj.b)
    return math.exp(special.betaln(s, t) - 0.5 * (special.betaln(di.a, di.b) + special.betaln(dj.a, dj.b)))


def _beta_a(di: Beta, dj: Beta) -> float:
    ai, bi, aj, bj = di.a, di.b, dj.a, dj.b
    s, t = 0.5 * (ai + aj), 0.5 * (bi + bj)
    lognorm = -0.5 * (special.betaln(ai, bi) + special.betaln(aj, bj))
    terms = [
        ((ai - 1) * (aj - 1), s - 2, t),
        (-((ai - 1) * (bj - 1) + (bi - 1) * (aj - 1)), s - 1, t - 1),
        ((bi - 1) * (bj - 1), s, t - 2),
    ]
    total = 0.0
    for coef, p, q in terms:
        if coef == 0:
            continue
        if p <= 0 or q <= 0:
            raise InfiniteInformation(f"<psi', psi'> diverges for {di} and {dj} (B({p:g}, {q:g}) term)")
        total += coef * math.exp(lognorm + special.betaln(p, q))
    return 0.25 * total


def _closed_b(di: Density, dj: Density) -> float | None:
    ci, cj = _as_closed_family(di), _as_closed_family(dj)
    if type(ci) is not type(cj):
        return None
    if isinstance(ci, (Normal, LogNormal)):
        return math.exp(_normal_log_b(ci.mu, ci.sigma, cj.mu, cj.sigma))
    if isinstance(ci, Gamma):
        return _gamma_b(ci, cj)
    if isinstance(ci, Beta):
        return _beta_b(ci, cj)
    return None


def _closed_a(di: Density, dj: Density) -> float | None:
    ci, cj = _as_closed_family(di), _as_closed_family(dj)
    if type(ci) is not type(cj):
        return None
    if isinstance(ci, Normal):
        return _normal_a(ci, cj)
    if isinstance(ci, Gamma):
        return _gamma_a(ci, cj)
    if isinstance(ci, Beta):
        return _beta_a(ci, cj)
    return None


# -- quadrature ---------------------------------------------------------------


def _common_region(di: Density, dj: Density) -> tuple[tuple[float, float], np.ndarray]:
    lo, hi = overlap(di, dj)
    if not lo < hi:
        raise DisjointSupports(f"{di} and {dj} have disjoint supports")
    pts = np.concatenate([di.breakpoints(), dj.breakpoints()])
    return (lo, hi), pts


def _quad_b(di, dj, cfg):
    region, pts = _common_region(di, dj)
    return quad_inner(lambda x: di.sqrt(x) * dj.sqrt(x), region, cfg, points=pts)


def _quad_a(di, dj, cfg):
    region, pts = _common_region(di, dj)
    return quad_inner(lambda x: di.sqrt_deriv(x) * dj.sqrt_deriv(x), region, cfg, points=pts)


# -- public entries -----------------------------------------------------------


def check_information(di: Density, dj: Density | None = None) -> None:
    """Raise :class:`InfiniteInformation` unless ``int psi'^2`` is finite for each density."""
    for d in (di,) if dj is None else (di, dj):
        if not d.has_finite_information():
            raise InfiniteInformation(f"{d} has infinite Fisher information (int psi'^2 diverges)")


def _b_entry(di, dj, cfg, method):
    lo, hi = overlap(di, dj)
    if not lo < hi:
        raise DisjointSupports(f"{di} and {dj} have disjoint supports")
    if di == dj and method != "quadrature":
        return 1.0, Provenance.CLOSED_FORM
    if method != "quadrature":
        val = _closed_b(di, dj)
        if val is not None:
            return min(val, 1.0), Provenance.CLOSED_FORM
        if method == "closed":
            raise ValueError(f"no closed form for B between {di.family} and {dj.family}")
    return min(_quad_b(di, dj, cfg), 1.0), Provenance.QUADRATURE


def _a_entry(di, dj, cfg, method):
    check_information(di, dj)
    if method != "quadrature":
        if not isinstance(_as_closed_family(di), LogNormal):
            val = _closed_a(di, dj)
            if val is not None:
                return val, Provenance.CLOSED_FORM
        if method == "closed":
            raise ValueError(f"no closed form for A between {di.family} and {dj.family}")
    return _quad_a(di, dj, cfg), Provenance.QUADRATURE


def b_entry(di: Density, dj: Density, cfg: QuadratureConfig | None = None, method: str = "auto") -> float:
    """Bhattacharyya coefficient ``int sqrt(f_i f_j)``.

    ``method`` is ``"auto"`` (closed form when available), ``"closed"`` or
    ``"quadrature"``.
    """
    return _b_entry(di, dj, cfg or DEFAULT_CONFIG, method)[0]


def a_entry(di: Density, dj: Density, cfg: QuadratureConfig | None = None, method: str = "auto") -> float:
    """``int psi_i'(x) psi_j'(x) dx``; see :func:`b_entry` for ``method``.

    Raises
    ------
    InfiniteInformation
        If either density has ``int psi'^2 = inf`` (beta shapes in ``(0, 1)``
        or ``(1, 2]``, gamma shapes other than 1 at or below 2).
    """
    return _a_entry(di, dj, cfg or DEFAULT_CONFIG, method)[0]


def gram(
    panel: Panel,
    cfg: QuadratureConfig | None = None,
    cancel: Callable[[], bool] | None = None,
) -> GramPair:
    """Assemble the A and B matrices of a panel.

    Each unordered pair is computed once and stored in both triangles.  The
    B diagonal is set to 1.  ``cancel`` is polled between entries; when it
    returns True the assembly stops with :class:`Cancelled`.
    """
    cfg = cfg or DEFAULT_CONFIG
    m = len(panel)
    a = np.zeros((m, m))
    b = np.zeros((m, m))
    prov = np.empty((m, m), dtype=object)
    experts = panel.experts
    for i in range(m):
        for j in range(i, m):
            if cancel is not None and cancel():
                raise Cancelled(f"gram assembly cancelled before entry ({i}, {j})")
            di, dj = experts[i], experts[j]
            try:
                if i == j:
                    bij, pb = 1.0, Provenance.CLOSED_FORM
                else:
                    bij, pb = _b_entry(di, dj, cfg, "auto")
                if di == dj and j != i:
                    aij, pa = a[i, i], prov[i, i]
                else:
                    aij, pa = _a_entry(di, dj, cfg, "auto")
            except PoolingError as exc:
                labels = panel.labels
                raise type(exc)(f"entry ({i}, {j}) [{labels[i]} / {labels[j]}]: {exc}") from exc
            b[i, j] = b[j, i] = bij
            a[i, j] = a[j, i] = aij
            prov[i, j] = prov[j, i] = (
                Provenance.QUADRATURE if Provenance.QUADRATURE in (pa, pb) else Provenance.CLOSED_FORM
            )
    warnings = []
    psd_a, psd_b = _psd(a, 1e-10), _psd(b, 1e-10)
    if not psd_a:
        warnings.append("A is not positive semidefinite within 1e-10 relative")
    if not psd_b:
        warnings.append("B is not positive semidefinite within 1e-10 relative")
    return GramPair(a, b, prov, tuple(warnings))


# -- text dumps ---------------------------------------------------------------


def write_gram(path, matrix: np.ndarray, kind: str) -> None:
    """Write ``matrix`` row-major with 17 significant digits under a ``m=<m> kind=<kind>`` header."""
    matrix = np.asarray(matrix, dtype=float)
    if kind not in ("A", "B"):
        raise ValueError("kind must be 'A' or 'B'")
    lines = [f"m={matrix.shape[0]} kind={kind}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in matrix]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_gram(path) -> tuple[str, np.ndarray]:
    text = Path(path).read_text(encoding="ascii").splitlines()
    header = dict(tok.split("=", 1) for tok in text[0].split())
    m = int(header["m"])
    rows = [[float(v) for v in line.split()] for line in text[1 : 1 + m]]
    mat = np.array(rows, dtype=float).reshape(m, m)
    return header["kind"], mat
