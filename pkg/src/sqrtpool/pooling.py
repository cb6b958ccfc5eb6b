"""From a panel of experts to a pooled prior ``f = (sum_i alpha_i psi_i)^2``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .densities import Panel, Tabulated
from .errors import InvalidRange
from .kernels import GramPair, gram
from .quadrature import QuadratureConfig
from .solver import RANK_TOL, PoolingSolution, min_rayleigh

__all__ = ["PooledPrior", "pool", "eval_pooled", "dominant_component", "sample_curve", "effective_support"]

EXPORT_POINTS = 4096


@dataclass(frozen=True)
class PooledPrior:
    panel: Panel
    alpha: np.ndarray
    information: float
    dominant_index: int
    reduction_percent: float
    gram: GramPair
    solution: PoolingSolution

    def sqrt(self, x):
        """Signed pooled square-root density ``sum_i alpha_i psi_i(x)``."""
        return self.alpha @ self.panel.sqrt_matrix(np.atleast_1d(x))

    def __call__(self, x):
        return eval_pooled(self, x)

    @property
    def dominant_label(self) -> str:
        return self.panel.labels[self.dominant_index]

    def effective_support(self, cut: float = 1e-12, pad: float = 0.1) -> tuple[float, float]:
        return effective_support(self.panel, cut, pad)

    def to_tabulated(self, n: int = EXPORT_POINTS) -> Tabulated:
        """The pooled prior on ``n`` equally spaced points over the experts' effective support."""
        lo, hi = self.effective_support()
        x = np.linspace(lo, hi, n)
        return Tabulated(x, eval_pooled(self, x))


def dominant_component(panel: Panel, g: GramPair) -> int:
    """Index of the least informative expert (smallest ``A[i, i]``, lowest index on ties)."""
    return int(np.argmin(np.diag(g.a)))


def effective_support(panel: Panel, cut: float = 1e-12, pad: float = 0.1) -> tuple[float, float]:
    """Union of the experts' ``f > cut * f(mode)`` intervals, widened by ``pad`` and clipped to the support."""
    ivs = [d.effective_support(cut) for d in panel.experts]
    lo = min(i[0] for i in ivs)
    hi = max(i[1] for i in ivs)
    width = hi - lo
    slo, shi = panel.support()
    return max(lo - pad * width, slo), min(hi + pad * width, shi)


def pool(
    panel: Panel,
    cfg: QuadratureConfig | None = None,
    rank_tol: float = RANK_TOL,
    cancel: Callable[[], bool] | None = None,
) -> PooledPrior:
    """Pool ``panel`` into the minimum-information prior.

    Examples
    --------
    >>> from sqrtpool import Normal, Panel, pool
    >>> pp = pool(Panel((Normal(-1, 1), Normal(1.49, 1.49))))
    >>> pp.alpha.round(2).tolist()
    [0.28, 0.81]
    """
    g = gram(panel, cfg, cancel=cancel)
    sol = min_rayleigh(g, rank_tol)
    d = dominant_component(panel, g)
    reduction = 100.0 * (1.0 - sol.information / (4.0 * float(g.a[d, d])))
    return PooledPrior(
        panel=panel,
        alpha=sol.alpha,
        information=sol.information,
        dominant_index=d,
        reduction_percent=reduction,
        gram=g,
        solution=sol,
    )


def eval_pooled(pp: PooledPrior, x):
    """Pooled density at ``x``; a scalar for scalar input."""
    s = pp.sqrt(x)
    out = s * s
    return float(out[0]) if np.ndim(x) == 0 else out


def sample_curve(pp: PooledPrior, lo: float, hi: float, n: int) -> np.ndarray:
    """Rows ``(x, pooled, f_1, ..., f_m)`` at ``n`` equally spaced points."""
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise InvalidRange(f"need finite lo < hi, got lo={lo}, hi={hi}")
    if n < 2:
        raise InvalidRange(f"need n >= 2, got {n}")
    x = np.linspace(lo, hi, int(n))
    experts = np.stack([d.pdf(x) for d in pp.panel.experts])
    return np.column_stack([x, eval_pooled(pp, x), experts.T])
