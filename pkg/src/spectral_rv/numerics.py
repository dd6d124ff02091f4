"""Shared numerical kernels: trapezoid quadrature, K0, Monte Carlo means.

All quadrature here is the composite trapezoid rule on uniform grids. For
the smooth, rapidly decaying integrands in this package that rule is
spectrally accurate, so no adaptive machinery is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _backend

__all__ = [
    "GridSpec",
    "McEstimate",
    "QuadResult",
    "integrate_1d",
    "integrate_2d",
    "trapezoid_weights",
    "bessel_k0",
    "mc_mean",
    "fourier_sum",
]

fourier_sum = _backend.fourier_sum


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``n`` points on ``[lo, hi]``; ``n`` must be odd."""

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if int(self.n) != self.n or self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"grid size must be an odd integer >= 3, got {self.n}")

    @classmethod
    def symmetric(cls, half_width: float, step: float) -> "GridSpec":
        m = int(round(half_width / step))
        return cls(-m * step, m * step, 2 * m + 1)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        # built from both ends so symmetric grids are symmetric to the last bit
        i = np.arange(self.n)
        pts = self.lo + i * self.step
        half = self.n // 2
        pts[half + 1:] = self.hi - (self.n - 1 - i[half + 1:]) * self.step
        pts[half] = 0.5 * (self.lo + self.hi)
        return pts

    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.n, self.step)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n}


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float

    def __float__(self):
        return float(self.value)


def _check_finite(vals: np.ndarray, *coords: np.ndarray) -> None:
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = np.argwhere(bad)[0]
        where = tuple(float(c[i]) for c, i in zip(coords, idx))
        raise ValueError(f"integrand is not finite at {where}")


def integrate_1d(f: Callable, grid: GridSpec, *, map: str | None = None) -> QuadResult:
    """Trapezoid integral of vectorised ``f`` with a Richardson error estimate.

    With ``map="exp"`` the grid is read in ``t`` and the integral is taken
    over ``x = exp(t)``, i.e. ``int_0^inf f(x) dx = int f(e^t) e^t dt``.
    The estimate compares the rule on ``h`` and ``2h`` (``n`` odd makes the
    coarse grid a subset).
    """
    t = grid.points
    if map is None:
        vals = np.asarray(f(t), dtype=float)
    elif map == "exp":
        x = np.exp(t)
        vals = np.asarray(f(x), dtype=float) * x
    else:
        raise ValueError(f"unknown map {map!r}")
    vals = np.broadcast_to(vals, t.shape)
    _check_finite(vals, t)
    h = grid.step
    fine = h * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    coarse_vals = vals[::2]
    coarse = 2 * h * (coarse_vals.sum() - 0.5 * (coarse_vals[0] + coarse_vals[-1]))
    return QuadResult(float(fine), float(abs(fine - coarse) / 3.0))


def integrate_2d(f: Callable, gx: GridSpec, gy: GridSpec) -> QuadResult:
    """Product trapezoid rule; ``f(X, Y)`` is called on ``indexing='ij'`` meshes."""
    x = gx.points
    y = gy.points
    X, Y = np.meshgrid(x, y, indexing="ij")
    vals = np.asarray(f(X, Y), dtype=float)
    vals = np.broadcast_to(vals, X.shape)
    _check_finite(vals, x, y)
    fine = gx.weights() @ vals @ gy.weights()
    cv = vals[::2, ::2]
    coarse = trapezoid_weights(cv.shape[0], 2 * gx.step) @ cv @ trapezoid_weights(
        cv.shape[1], 2 * gy.step
    )
    return QuadResult(float(fine), float(abs(fine - coarse) / 3.0))


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero.

    Power series below x = 2, Steed's continued fraction above. Accepts a
    scalar or an array; raises ``ValueError`` for x <= 0.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("bessel_k0 is defined for x > 0 only")
    out = _backend.bessel_k0(arr.ravel()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    seed: int

    def within(self, target: float, k: float = 4.0) -> bool:
        return abs(self.mean - target) <= k * self.std_error


def mc_mean(sampler: Callable, g: Callable, n: int, seed: int) -> McEstimate:
    """Sample mean and standard error of ``g(sampler(rng, n))``.

    ``rng`` is ``numpy.random.default_rng(seed)``, so identical seeds give
    identical bits.
    """
    if n < 100:
        raise ValueError("mc_mean needs n >= 100")
    rng = np.random.default_rng(seed)
    vals = np.asarray(g(sampler(rng, n)), dtype=float)
    vals = np.broadcast_to(vals, (n,))
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n))
    return McEstimate(mean, se, n, seed)
