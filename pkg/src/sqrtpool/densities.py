"""Univariate densities and their square-root embeddings.

Every density exposes vectorised evaluation of the pdf ``f``, the
square-root density ``psi = sqrt(f)`` and its derivative ``psi'``.
Values outside the support are zero.  Parametric families evaluate in log
space, so ``psi`` stays finite for very peaked or far-out densities.

The JSON representation used by panel files is produced by
:meth:`Density.to_dict` and parsed by :func:`density_from_dict`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np
from scipy import optimize, special

from .errors import BoundaryPoint, DisjointSupports, InvalidDensity, InvalidPanel

__all__ = [
    "Density",
    "Normal",
    "Beta",
    "Gamma",
    "Exponential",
    "LogNormal",
    "Tabulated",
    "Panel",
    "eval_pdf",
    "eval_sqrt",
    "eval_sqrt_deriv",
    "density_from_dict",
]

# Probability levels used to place quadrature breakpoints.
_BREAK_LEVELS = np.array(
    [1e-12, 1e-8, 1e-5, 1e-3, 0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98, 1 - 1e-3, 1 - 1e-5, 1 - 1e-8, 1 - 1e-12]
)
_NORMAL_Z = special.ndtri(_BREAK_LEVELS)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise InvalidDensity(f"{name} must be finite and > 0, got {value!r}")
    return value


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidDensity(f"{name} must be finite, got {value!r}")
    return value


class Density:
    """Base class.  Subclasses implement ``_logpdf`` and ``_dlog_sqrt``."""

    family: ClassVar[str] = ""

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def _logpdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dlog_sqrt(self, x: np.ndarray) -> np.ndarray:
        """d/dx log(psi) at points strictly inside the support."""
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        """Points inside the support where quadrature should split."""
        raise NotImplementedError

    def mode(self) -> float:
        raise NotImplementedError

    def scale(self) -> float:
        """A characteristic width, used to bracket root searches."""
        raise NotImplementedError

    def has_finite_information(self) -> bool:
        return True

    def to_dict(self) -> dict:
        raise NotImplementedError

    # -- evaluation -------------------------------------------------------

    def _inside(self, x: np.ndarray, closed: bool = True) -> np.ndarray:
        lo, hi = self.support()
        if closed:
            return (x >= lo) & (x <= hi)
        return (x > lo) & (x < hi)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -np.inf)
        mask = self._inside(x)
        if mask.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                out[mask] = self._logpdf(x[mask])
        return out

    def pdf(self, x):
        # squared square root, so that pooling a single expert reproduces it bit for bit
        s = self.sqrt(x)
        return s * s

    def sqrt(self, x):
        return np.exp(0.5 * self.logpdf(x))

    def sqrt_deriv(self, x):
        """psi'(x); zero outside the open support."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        mask = self._inside(x, closed=False)
        if mask.any():
            xm = x[mask]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                psi = np.exp(0.5 * self._logpdf(xm))
                val = psi * self._dlog_sqrt(xm)
            # psi underflows to zero before the log-derivative overflows
            out[mask] = np.where(psi == 0.0, 0.0, val)
        return out

    def effective_support(self, cut: float = 1e-12) -> tuple[float, float]:
        """Interval outside which ``f < cut * f(mode)``, clipped to the support."""
        lo, hi = self.support()
        m = self.mode()
        ref = float(self.logpdf(m))
        if not math.isfinite(ref):
            # unbounded density at a boundary mode: measure against a central point
            m = self._central_point()
            ref = float(self.logpdf(m))
        target = ref + math.log(cut)

        def excess(t):
            return max(float(self.logpdf(t)) - target, -1e6)

        def edge(direction: int, bound: float) -> float:
            inner, step = m, self.scale()
            while True:
                outer = m + direction * step
                if direction * (outer - bound) >= 0:
                    if excess(bound) > 0:
                        return bound
                    outer = bound
                if excess(outer) <= 0:
                    a, b = sorted((inner, outer))
                    return optimize.brentq(excess, a, b, xtol=1e-12 * max(1.0, abs(m)))
                inner, step = outer, 2 * step

        return edge(-1, lo), edge(+1, hi)

    def _central_point(self) -> float:
        lo, hi = self.support()
        bp = self.breakpoints()
        return float(bp[len(bp) // 2]) if len(bp) else 0.5 * (lo + hi)


@dataclass(frozen=True)
class Normal(Density):
    mu: float
    sigma: float
    family: ClassVar[str] = "normal"

    def __post_init__(self):
        object.__setattr__(self, "mu", _finite("mu", self.mu))
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))

    def support(self):
        return (-math.inf, math.inf)

    def _logpdf(self, x):
        z = (x - self.mu) / self.sigma
        return -0.5 * z * z - math.log(self.sigma) - 0.5 * math.log(2 * math.pi)

    def _dlog_sqrt(self, x):
        return -(x - self.mu) / (2 * self.sigma**2)

    def breakpoints(self):
        return self.mu + self.sigma * _NORMAL_Z

    def mode(self):
        return self.mu

    def scale(self):
        return self.sigma

    def effective_support(self, cut=1e-12):
        half = self.sigma * math.sqrt(-2.0 * math.log(cut))
        return (self.mu - half, self.mu + half)

    def to_dict(self):
        return {"family": "normal", "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class LogNormal(Density):
    """Log-normal with location ``mu`` and scale ``sigma`` of ``log x``."""

    mu: float
    sigma: float
    family: ClassVar[str] = "lognormal"

    def __post_init__(self):
        object.__setattr__(self, "mu", _finite("mu", self.mu))
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))

    def support(self):
        return (0.0, math.inf)

    def _logpdf(self, x):
        lx = np.log(x)
        z = (lx - self.mu) / self.sigma
        out = -lx - 0.5 * z * z - math.log(self.sigma) - 0.5 * math.log(2 * math.pi)
        return np.where(x > 0, out, -np.inf)

    def _dlog_sqrt(self, x):
        return -(1.0 + (np.log(x) - self.mu) / self.sigma**2) / (2 * x)

    def breakpoints(self):
        return np.exp(self.mu + self.sigma * _NORMAL_Z)

    def mode(self):
        return math.exp(self.mu - self.sigma**2)

    def scale(self):
        return math.exp(self.mu) * math.expm1(self.sigma) + 1e-300

    def effective_support(self, cut=1e-12):
        # solve in y = log x, where the log density is -y - (y - mu)^2 / (2 sigma^2) + c
        s2 = self.sigma**2
        ym = self.mu - s2
        ref = -ym - (ym - self.mu) ** 2 / (2 * s2)
        target = ref + math.log(cut)
        # quadratic: (y - mu)^2 / (2 s2) + y + target = 0
        a, b, c = 1 / (2 * s2), 1 - self.mu / s2, self.mu**2 / (2 * s2) + target
        disc = math.sqrt(b * b - 4 * a * c)
        y1, y2 = (-b - disc) / (2 * a), (-b + disc) / (2 * a)
        return (math.exp(y1), math.exp(y2))

    def to_dict(self):
        return {"family": "lognormal", "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class Gamma(Density):
    """Gamma with ``shape`` and ``rate``: f(x) = rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)."""

    shape: float
    rate: float
    family: ClassVar[str] = "gamma"

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def support(self):
        return (0.0, math.inf)

    def _logpdf(self, x):
        a, b = self.shape, self.rate
        return a * math.log(b) - special.gammaln(a) + special.xlogy(a - 1, x) - b * x

    def _dlog_sqrt(self, x):
        return (self.shape - 1) / (2 * x) - self.rate / 2

    def breakpoints(self):
        return special.gammaincinv(self.shape, _BREAK_LEVELS) / self.rate

    def mode(self):
        return max(self.shape - 1, 0.0) / self.rate

    def scale(self):
        return math.sqrt(self.shape) / self.rate

    def has_finite_information(self):
        return self.shape == 1 or self.shape > 2

    def to_dict(self):
        return {"family": "gamma", "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class Exponential(Density):
    rate: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def support(self):
        return (0.0, math.inf)

    def _logpdf(self, x):
        return math.log(self.rate) - self.rate * x

    def _dlog_sqrt(self, x):
        return np.full_like(x, -self.rate / 2)

    def breakpoints(self):
        return -np.log1p(-_BREAK_LEVELS) / self.rate

    def mode(self):
        return 0.0

    def scale(self):
        return 1.0 / self.rate

    def effective_support(self, cut=1e-12):
        return (0.0, -math.log(cut) / self.rate)

    def as_gamma(self) -> Gamma:
        return Gamma(1.0, self.rate)

    def to_dict(self):
        return {"family": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Beta(Density):
    a: float
    b: float
    family: ClassVar[str] = "beta"

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    def support(self):
        return (0.0, 1.0)

    def _logpdf(self, x):
        return special.xlogy(self.a - 1, x) + special.xlog1py(self.b - 1, -x) - special.betaln(self.a, self.b)

    def _dlog_sqrt(self, x):
        return 0.5 * ((self.a - 1) / x - (self.b - 1) / (1 - x))

    def breakpoints(self):
        pts = special.betaincinv(self.a, self.b, _BREAK_LEVELS)
        # integrable endpoint singularities get their own panels
        return np.concatenate([[1e-8], pts, [1 - 1e-8]])

    def mode(self):
        a, b = self.a, self.b
        if a > 1 and b > 1:
            return (a - 1) / (a + b - 2)
        if a <= 1 and b > 1:
            return 0.0
        if b <= 1 and a > 1:
            return 1.0
        return 0.5

    def scale(self):
        a, b = self.a, self.b
        return math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1)))

    def has_finite_information(self):
        return (self.a == 1 or self.a > 2) and (self.b == 1 or self.b > 2)

    def to_dict(self):
        return {"family": "beta", "a": self.a, "b": self.b}


def _central_diff(y: np.ndarray, grid: np.ndarray) -> np.ndarray:
    out = np.gradient(y, grid)
    step = np.diff(grid)
    h = (grid[-1] - grid[0]) / (grid.size - 1)
    if grid.size >= 5 and np.all(np.abs(step - h) <= 1e-9 * h):
        out[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    return out


@dataclass(frozen=True, eq=False)
class Tabulated(Density):
    """Piecewise-linear density on a sorted grid, renormalised by the trapezoid rule.

    ``psi'`` is the central difference of ``sqrt(values)`` at the grid nodes
    (five-point on uniform grids, three-point otherwise), linearly
    interpolated between nodes.
    """

    grid: np.ndarray
    values: np.ndarray
    _dpsi: np.ndarray = field(init=False, repr=False)
    family: ClassVar[str] = "tabulated"

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise InvalidDensity("grid and values must be 1-d arrays of equal length >= 2")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise InvalidDensity("grid and values must be finite")
        if np.any(np.diff(grid) <= 0):
            raise InvalidDensity("grid must be strictly increasing")
        if np.any(values < 0):
            raise InvalidDensity("values must be nonnegative")
        total = np.trapezoid(values, grid)
        if total <= 0:
            raise InvalidDensity("values integrate to zero")
        values = values / total
        grid.flags.writeable = False
        values.flags.writeable = False
        dpsi = _central_diff(np.sqrt(values), grid)
        dpsi.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_dpsi", dpsi)

    def __eq__(self, other):
        if not isinstance(other, Tabulated):
            return NotImplemented
        return np.array_equal(self.grid, other.grid) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.grid.tobytes(), self.values.tobytes()))

    def support(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def sqrt(self, x):
        return np.sqrt(self.pdf(x))

    def sqrt_deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.grid, self._dpsi)
        return np.where(self._inside(x, closed=False), out, 0.0)

    def breakpoints(self):
        return self.grid[1:-1]

    def mode(self):
        return float(self.grid[np.argmax(self.values)])

    def scale(self):
        return float(self.grid[-1] - self.grid[0]) / 4

    def effective_support(self, cut=1e-12):
        keep = np.nonzero(self.values >= cut * self.values.max())[0]
        return (float(self.grid[keep[0]]), float(self.grid[keep[-1]]))

    def to_dict(self):
        return {"family": "tabulated", "grid": self.grid.tolist(), "values": self.values.tolist()}


# -- functional interface ----------------------------------------------------


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def eval_pdf(d: Density, x):
    """f(x); zero outside the support."""
    return _scalar_or_array(x, d.pdf(x))


def eval_sqrt(d: Density, x):
    """psi(x) = sqrt(f(x)); zero outside the support."""
    return _scalar_or_array(x, d.sqrt(x))


def eval_sqrt_deriv(d: Density, x):
    """psi'(x) from the family's analytic form.

    Raises
    ------
    BoundaryPoint
        If ``x`` is a finite endpoint of the support.
    """
    lo, hi = d.support()
    xa = np.asarray(x, dtype=float)
    if np.any(xa == lo) or np.any(xa == hi):
        raise BoundaryPoint(f"psi' is undefined on the support boundary {d.support()}")
    return _scalar_or_array(x, d.sqrt_deriv(xa))


_FAMILIES = {
    "normal": (Normal, ("mu", "sigma")),
    "lognormal": (LogNormal, ("mu", "sigma")),
    "gamma": (Gamma, ("shape", "rate")),
    "exponential": (Exponential, ("rate",)),
    "beta": (Beta, ("a", "b")),
    "tabulated": (Tabulated, ("grid", "values")),
}


def density_from_dict(doc: dict) -> Density:
    """Build a density from its JSON form, e.g. ``{"family": "beta", "a": 2, "b": 3}``."""
    if not isinstance(doc, dict) or "family" not in doc:
        raise InvalidDensity(f"density must be an object with a 'family' key, got {doc!r}")
    family = str(doc["family"]).lower()
    if family not in _FAMILIES:
        raise InvalidDensity(f"unknown family {doc['family']!r}; expected one of {sorted(_FAMILIES)}")
    cls, params = _FAMILIES[family]
    extra = set(doc) - set(params) - {"family"}
    missing = [p for p in params if p not in doc]
    if missing:
        raise InvalidDensity(f"{family}: missing parameter(s) {missing}")
    if extra:
        raise InvalidDensity(f"{family}: unexpected key(s) {sorted(extra)}")
    try:
        return cls(*(doc[p] for p in params))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidDensity):
            raise
        raise InvalidDensity(f"{family}: {exc}") from exc


def overlap(di: Density, dj: Density) -> tuple[float, float]:
    """Intersection of two supports (may be empty, i.e. lo >= hi)."""
    (a0, a1), (b0, b1) = di.support(), dj.support()
    return (max(a0, b0), min(a1, b1))


@dataclass(frozen=True)
class Panel:
    """An ordered collection of expert densities."""

    experts: tuple
    labels: tuple = ()

    def __post_init__(self):
        experts = tuple(self.experts)
        if not experts:
            raise InvalidPanel("a panel needs at least one expert")
        for e in experts:
            if not isinstance(e, Density):
                raise InvalidPanel(f"not a Density: {e!r}")
        labels = tuple(self.labels) if self.labels else tuple(f"expert{i + 1}" for i in range(len(experts)))
        if len(labels) != len(experts):
            raise InvalidPanel("labels and experts differ in length")
        if len(set(labels)) != len(labels):
            raise InvalidPanel("labels must be unique")
        for i in range(len(experts)):
            for j in range(i + 1, len(experts)):
                lo, hi = overlap(experts[i], experts[j])
                if not lo < hi:
                    raise DisjointSupports(f"experts {labels[i]!r} and {labels[j]!r} have disjoint supports")
        object.__setattr__(self, "experts", experts)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.experts)

    def __iter__(self):
        return iter(self.experts)

    def __getitem__(self, i):
        return self.experts[i]

    @property
    def m(self) -> int:
        return len(self.experts)

    def subset(self, indices: Sequence[int]) -> "Panel":
        return Panel(tuple(self.experts[i] for i in indices), tuple(self.labels[i] for i in indices))

    def support(self) -> tuple[float, float]:
        """Union of the expert supports (they pairwise overlap, so this is an interval)."""
        sups = [d.support() for d in self.experts]
        return (min(s[0] for s in sups), max(s[1] for s in sups))

    def sqrt_matrix(self, x) -> np.ndarray:
        """Rows psi_i(x), shape (m, len(x))."""
        x = np.asarray(x, dtype=float)
        return np.stack([d.sqrt(x) for d in self.experts])

    def sqrt_deriv_matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack([d.sqrt_deriv(x) for d in self.experts])
