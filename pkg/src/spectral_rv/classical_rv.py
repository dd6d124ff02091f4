"""Classical random variables on grids.

Densities live on uniform grids and are integrated with the trapezoid
rule. Characteristic functions are plain callables ``s -> phi(s)``.
Densities of transformed variables ``Y = g(X1, X2)`` come from two
routes: integrating the joint density against the constraint (used for
the Gaussian product, where the integral is one-dimensional) and Fourier
inversion of ``phi_Y(s) = E[exp(i s g(X1, X2))]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import exp1

from .io import write_csv
from .numerics import GridSpec, QuadResult, fourier_sum, integrate_1d, trapezoid_weights, bessel_k0

__all__ = [
    "InversionError",
    "SingularityError",
    "GridDensity",
    "GridDensity2D",
    "CharFn",
    "BivariateGaussianParams",
    "SampleBatch",
    "NormalDensity",
    "normal_pdf",
    "cdf_from_pdf",
    "expect_g",
    "charfn_from_pdf",
    "pdf_from_charfn",
    "moment_from_charfn",
    "bivariate_gaussian_pdf",
    "sample_bivariate_gaussian",
    "sum_pdf_gaussian",
    "product_pdf_gaussian",
    "product_pdf_quadrature",
    "product_pdf_mass",
    "sum_charfn_gaussian",
    "product_charfn_gaussian",
    "rvt_transform",
]

DECAY_TOL = 1e-10
NORM_TOL = 1e-6
INVERSION_NORM_TOL = 1e-3


class InversionError(RuntimeError):
    """Fourier inversion could not produce a normalized density."""


class SingularityError(ValueError):
    """Evaluation requested at a point where the density diverges."""


def normal_pdf(x, mu: float = 0.0, sigma: float = 1.0):
    z = (np.asarray(x, dtype=float) - mu) / sigma
    return np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * sigma)


@dataclass(frozen=True, eq=False)
class GridDensity:
    """PDF sampled on a uniform grid.

    When ``normalized`` is set, the trapezoid integral must be within
    ``tol_norm`` of one.
    """

    grid: GridSpec
    values: np.ndarray
    normalized: bool = True
    tol_norm: float = NORM_TOL
    warning: str | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size != self.grid.n:
            raise ValueError(f"expected {self.grid.n} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("density has non-finite values")
        if v.min() < -1e-12:
            raise ValueError(f"density is negative ({v.min():.3e})")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.normalized:
            total = self.integral()
            if abs(total - 1.0) > self.tol_norm:
                raise ValueError(f"density integrates to {total!r}, not 1 within {self.tol_norm}")

    @classmethod
    def from_function(cls, f: Callable, grid: GridSpec, **kw) -> "GridDensity":
        return cls(grid, f(grid.points), **kw)

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    @property
    def x_min(self) -> float:
        return self.grid.lo

    @property
    def x_max(self) -> float:
        return self.grid.hi

    @property
    def n_points(self) -> int:
        return self.grid.n

    def integral(self) -> float:
        return float(self.grid.weights() @ self.values)

    def __call__(self, x):
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)

    def write_csv(self, path, header=("x", "f")):
        return write_csv(path, header, [self.x, self.values])


@dataclass(frozen=True, eq=False)
class GridDensity2D:
    """Joint density on the product grid ``gx x gy`` (``values[i, j] = f(x_i, y_j)``)."""

    gx: GridSpec
    gy: GridSpec
    values: np.ndarray
    tol_norm: float = NORM_TOL

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.gx.n, self.gy.n):
            raise ValueError(f"expected shape {(self.gx.n, self.gy.n)}, got {v.shape}")
        if v.min() < -1e-12:
            raise ValueError("joint density is negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        total = self.integral()
        if abs(total - 1.0) > self.tol_norm:
            raise ValueError(f"joint density integrates to {total!r}")

    @classmethod
    def from_function(cls, f: Callable, gx: GridSpec, gy: GridSpec, **kw) -> "GridDensity2D":
        X, Y = np.meshgrid(gx.points, gy.points, indexing="ij")
        return cls(gx, gy, f(X, Y), **kw)

    def weights(self) -> np.ndarray:
        return np.outer(self.gx.weights(), self.gy.weights())

    def integral(self) -> float:
        return float(self.gx.weights() @ self.values @ self.gy.weights())

    def marginal_x(self) -> np.ndarray:
        return self.values @ self.gy.weights()


@dataclass(frozen=True, eq=False)
class CharFn:
    """Characteristic function ``s -> E[exp(i s X)]``.

    ``s_max`` bounds the frequencies where ``evaluator`` is trustworthy;
    asking beyond it raises. ``warning`` carries diagnostics from the
    construction (e.g. an undecayed source density).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    s_max: float = math.inf
    name: str = ""
    warning: str | None = None

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        if np.any(np.abs(arr) > self.s_max):
            raise ValueError(f"|s| exceeds the valid range {self.s_max:.6g} of this characteristic function")
        out = np.asarray(self.evaluator(arr.ravel()), dtype=complex).reshape(arr.shape)
        return complex(out) if out.ndim == 0 else out

    def sample(self, s) -> tuple[np.ndarray, np.ndarray]:
        s = np.asarray(s, dtype=float)
        return s, self(s)

    def invariant_defects(self, s) -> dict[str, float]:
        s = np.asarray(s, dtype=float)
        v = self(s)
        return {
            "at_zero": abs(self(0.0) - 1.0),
            "hermitian": float(np.max(np.abs(self(-s) - np.conj(v)))),
            "modulus_excess": float(max(0.0, np.max(np.abs(v)) - 1.0)),
        }

    def write_csv(self, path, s):
        s, v = self.sample(s)
        return write_csv(path, ("s", "re", "im"), [s, v.real, v.imag])


@dataclass(frozen=True)
class BivariateGaussianParams:
    mu1: float = 0.0
    mu2: float = 0.0
    sigma1: float = 1.0
    sigma2: float = 1.0
    rho: float = 0.0

    RHO_EPS = 1e-9

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ValueError("sigma1 and sigma2 must be positive")
        if not (-1 + self.RHO_EPS <= self.rho <= 1 - self.RHO_EPS):
            raise ValueError(f"rho must lie in [-1+{self.RHO_EPS}, 1-{self.RHO_EPS}], got {self.rho}")

    @property
    def cov(self) -> np.ndarray:
        c = self.rho * self.sigma1 * self.sigma2
        return np.array([[self.sigma1**2, c], [c, self.sigma2**2]])

    @property
    def det(self) -> float:
        return self.sigma1**2 * self.sigma2**2 * (1 - self.rho**2)

    @property
    def D(self) -> float:
        """``sqrt(det V)``."""
        return self.sigma1 * self.sigma2 * math.sqrt(1 - self.rho**2)

    @property
    def centered(self) -> bool:
        return self.mu1 == 0 and self.mu2 == 0


@dataclass(frozen=True, eq=False)
class SampleBatch:
    pairs: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return self.pairs.shape[0]

    @property
    def x1(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def x2(self) -> np.ndarray:
        return self.pairs[:, 1]


@dataclass(frozen=True)
class NormalDensity:
    mu: float
    sigma: float
    degenerate: bool = False

    def pdf(self, x):
        if self.degenerate:
            raise SingularityError("degenerate normal (sigma ~ 0) has no density")
        return normal_pdf(x, self.mu, self.sigma)

    def on_grid(self, grid: GridSpec) -> GridDensity:
        return GridDensity.from_function(self.pdf, grid)


# -- grid densities ---------------------------------------------------------

def cdf_from_pdf(f: GridDensity, x: float) -> float:
    """``P(X <= x)``: integral of the piecewise-linear interpolant of ``f``."""
    xs = f.x
    if x <= xs[0]:
        return 0.0
    if x > xs[-1]:
        return 1.0
    if x == xs[-1]:
        return float(min(1.0, max(0.0, f.integral())))
    k = int(np.searchsorted(xs, x, side="right")) - 1
    v = f.values
    h = f.grid.step
    full = h * (v[:k + 1].sum() - 0.5 * (v[0] + v[k]))
    t = x - xs[k]
    fx = v[k] + (v[k + 1] - v[k]) * t / h
    val = full + 0.5 * t * (v[k] + fx)
    return float(min(1.0, max(0.0, val)))


def expect_g(f: GridDensity, g: Callable) -> float:
    """``E[g(X)]`` by trapezoid quadrature of ``g * f``."""
    gv = np.broadcast_to(np.asarray(g(f.x), dtype=float), f.x.shape)
    return float(f.grid.weights() @ (gv * f.values))


def charfn_from_pdf(f: GridDensity) -> CharFn:
    """``phi(s) = int exp(isx) f(x) dx`` by the trapezoid rule.

    The rule is trusted for ``|s| <= pi / (8 h)``; the returned CharFn
    refuses larger frequencies. The weights are renormalised so that
    ``phi(0) = 1`` exactly.
    """
    h = f.grid.step
    w = f.grid.weights() * f.values
    w = w / w.sum()
    x = f.x
    edge = max(abs(f.values[0]), abs(f.values[-1]))
    warning = None
    if edge >= 1e-12:
        warning = f"density has not decayed at the grid ends (|f| = {edge:.3e})"

    def evaluator(s):
        return fourier_sum(x, w, s, 1.0)

    return CharFn(evaluator, s_max=math.pi / (8 * h), name="grid", warning=warning)


def _expn_complex(kmax: int, z: np.ndarray) -> list[np.ndarray]:
    """``[E_1(z), ..., E_kmax(z)]`` for complex ``z`` with ``Re z >= 0``.

    Upward recurrence ``E_{k+1} = (exp(-z) - z E_k) / k``. At ``z = 0``
    ``E_1`` diverges and ``E_k = 1/(k-1)`` for ``k >= 2``.
    """
    z = np.asarray(z, dtype=complex)
    zero = z == 0
    zs = np.where(zero, 1.0, z)
    e = [exp1(zs)]
    ez = np.exp(-zs)
    for k in range(1, kmax):
        e.append((ez - zs * e[-1]) / k)
    out = []
    for k, ek in enumerate(e, start=1):
        ek = ek.copy()
        ek[zero] = np.inf if k == 1 else 1.0 / (k - 1)
        out.append(ek)
    return out


def _tail_integral(coeffs, S: float, y: np.ndarray, extra: int = 0) -> np.ndarray:
    """``int_S^inf exp(-isy) sum_k c_k s^-(k+extra) ds`` (``k`` from 1)."""
    if not len(coeffs):
        return np.zeros_like(y, dtype=complex)
    y = np.asarray(y, dtype=float)
    kmax = len(coeffs) + extra
    en = _expn_complex(kmax, 1j * S * y)
    total = np.zeros(y.shape, dtype=complex)
    for k, c in enumerate(coeffs, start=1):
        p = k + extra
        total += c * S ** (1 - p) * en[p - 1]
    return total


def _fit_tail(phi: CharFn, S: float, terms: int) -> np.ndarray:
    s = np.linspace(0.5 * S, S, 64)
    vals = phi(s)
    basis = np.column_stack([s ** -k for k in range(1, terms + 1)])
    scale = basis.max(axis=0)
    coeffs, *_ = np.linalg.lstsq(basis / scale, vals, rcond=None)
    coeffs = coeffs / scale
    resid = float(np.max(np.abs(basis @ coeffs - vals)))
    if resid > 1e-4 * max(float(np.max(np.abs(vals))), 1e-300):
        raise InversionError(
            f"characteristic function does not follow a power-law tail near s_max={S} "
            f"(fit residual {resid:.3e})"
        )
    return coeffs


def pdf_from_charfn(phi: CharFn, grid: GridSpec, s_max: float, *, tail_terms: int = 0) -> GridDensity:
    """Invert ``phi`` on ``grid``: ``f(y) = (1/pi) Re int_0^inf exp(-isy) phi(s) ds``.

    The half-line form relies on ``phi(-s) = conj(phi(s))``. The integral
    is truncated at ``s_max`` with step ``ds <= pi / (8 max|y|)``. With
    ``tail_terms = 0`` the caller must pick ``s_max`` so that
    ``|phi(s_max)| < 1e-10``. Characteristic functions that decay only
    algebraically (e.g. a product of Gaussians, ``phi ~ 1/s``) pass
    ``tail_terms > 0``: ``phi`` is fitted on ``[s_max/2, s_max]`` by
    ``sum_k c_k s^-k`` and the remainder integral is added analytically
    through generalized exponential integrals. That tail is singular at
    ``y = 0``, which must then be off the grid.

    The mass inside ``[lo, hi]`` is computed in Fourier space (insensitive
    to integrable singularities on the grid); if it is off by more than
    1e-3 the inversion is rejected, otherwise the values are divided by it.
    """
    y = grid.points
    ymax = max(abs(grid.lo), abs(grid.hi))
    if s_max > phi.s_max:
        raise ValueError(f"s_max={s_max} exceeds the valid range {phi.s_max:.6g} of phi")
    ds = min(math.pi / (8 * ymax), s_max / 64)
    m = math.ceil(s_max / ds)
    ds = s_max / m
    s = np.arange(m + 1) * ds
    s[-1] = s_max
    vals_phi = phi(s)

    coeffs: np.ndarray = np.zeros(0, dtype=complex)
    if tail_terms:
        coeffs = _fit_tail(phi, s_max, tail_terms)
        if abs(coeffs[0]) > 0 and np.any(y == 0):
            raise SingularityError("grid contains y = 0, where a 1/s tail makes the density diverge")
    else:
        edge = max(abs(vals_phi[-1]), abs(phi(-s_max)))
        if edge >= DECAY_TOL:
            raise InversionError(
                f"|phi(s_max)| = {edge:.3e} >= {DECAY_TOL}: truncation at s_max={s_max} too aggressive"
            )

    w = trapezoid_weights(m + 1, ds) * vals_phi
    dens = fourier_sum(s, w, y, -1.0).real
    if coeffs.size:
        dens = dens + _tail_integral(coeffs, s_max, y).real
        # Euler-Maclaurin endpoint term; the integrand has not decayed at s_max
        k = np.arange(1, coeffs.size + 1)
        dphi = np.sum(-k * coeffs * s_max ** (-k - 1.0))
        dF = np.exp(-1j * s_max * y) * (-1j * y * vals_phi[-1] + dphi)
        dens = dens - (ds * ds / 12.0) * dF.real
    dens /= math.pi

    # mass in [lo, hi]: (1/pi) int_0^inf Im(phi(s) (e^{-is lo} - e^{-is hi})) / s ds
    ends = np.array([grid.lo, grid.hi])
    z = fourier_sum(s[1:], w[1:] / s[1:], ends, -1.0)
    mass = (grid.hi - grid.lo) * w[0].real + (z[0] - z[1]).imag
    if coeffs.size:
        t = _tail_integral(coeffs, s_max, ends, extra=1)
        mass += (t[0] - t[1]).imag
    mass /= math.pi
    if not abs(mass - 1.0) <= INVERSION_NORM_TOL:
        raise InversionError(f"inverted density has mass {mass!r} on [{grid.lo}, {grid.hi}]")

    dens /= mass
    # truncation ripple dips slightly below zero in the far tails
    ripple = 1e-6 * float(np.max(dens))
    dens = np.where((dens < 0) & (dens >= -ripple), 0.0, dens)
    h = grid.step
    trap = h * (dens.sum() - 0.5 * (dens[0] + dens[-1]))
    return GridDensity(grid, dens, normalized=abs(trap - 1.0) <= NORM_TOL)


_FD_STENCILS = {
    1: ([-1, 1], [-1.0, 1.0], 2.0),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0], 1.0),
    3: ([-2, -1, 1, 2], [-1.0, 2.0, -2.0, 1.0], 2.0),
    4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0], 1.0),
}


def moment_from_charfn(phi: CharFn, n: int, h: float = 1e-3) -> float:
    """n-th moment ``phi^(n)(0) / i^n`` by central differences plus one Richardson step."""
    if n not in _FD_STENCILS:
        raise ValueError("moment order must be 1, 2, 3 or 4")
    offs, coef, denom = _FD_STENCILS[n]

    def deriv(step):
        vals = phi(np.array(offs, dtype=float) * step)
        return np.dot(coef, vals) / (denom * step**n)

    d = (4.0 * deriv(0.5 * h) - deriv(h)) / 3.0
    val = d / (1j) ** n
    # roundoff floor of the stencil: eps * sum|coef| / h^n
    floor = 100 * np.finfo(float).eps * sum(abs(c) for c in coef) / (0.5 * h) ** n
    tol = max(1e-8, floor)
    if abs(val.imag) > tol:
        raise ValueError(f"moment has imaginary residue {val.imag:.3e} > {tol:.1e}; phi is not Hermitian")
    return float(val.real)


# -- bivariate Gaussian -----------------------------------------------------

def bivariate_gaussian_pdf(p: BivariateGaussianParams, x1, x2):
    d1 = (np.asarray(x1, dtype=float) - p.mu1) / p.sigma1
    d2 = (np.asarray(x2, dtype=float) - p.mu2) / p.sigma2
    q = (d1 * d1 - 2 * p.rho * d1 * d2 + d2 * d2) / (1 - p.rho**2)
    out = np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(p.det))
    return float(out) if np.ndim(out) == 0 else out


def sample_bivariate_gaussian(p: BivariateGaussianParams, n: int, seed: int) -> SampleBatch:
    if n < 1:
        raise ValueError("n must be >= 1")
    z = np.random.default_rng(seed).standard_normal((n, 2))
    x1 = p.mu1 + p.sigma1 * z[:, 0]
    x2 = p.mu2 + p.sigma2 * (p.rho * z[:, 0] + math.sqrt(1 - p.rho**2) * z[:, 1])
    return SampleBatch(np.column_stack([x1, x2]), seed)


def sum_pdf_gaussian(p: BivariateGaussianParams) -> NormalDensity:
    """Density of ``X1 + X2``: normal with mean ``mu1 + mu2``."""
    var = p.sigma1**2 + 2 * p.rho * p.sigma1 * p.sigma2 + p.sigma2**2
    sigma = math.sqrt(max(var, 0.0))
    return NormalDensity(p.mu1 + p.mu2, sigma, degenerate=sigma < 1e-4 * (p.sigma1 + p.sigma2))


def _require_centered(p: BivariateGaussianParams):
    if not p.centered:
        raise ValueError("product formulas need mu1 = mu2 = 0")


def product_pdf_gaussian(p: BivariateGaussianParams, y):
    """Density of ``X1 X2``.

    ``exp(rho y / c) K0(|y| / c) / (pi D)`` with ``D = sqrt(det V)`` and
    ``c = sigma1 sigma2 (1 - rho^2)``. For ``rho = 0``, ``c = D``.
    """
    _require_centered(p)
    y = np.asarray(y, dtype=float)
    if np.any(y == 0):
        raise SingularityError("product density has a logarithmic singularity at y = 0")
    c = p.sigma1 * p.sigma2 * (1 - p.rho**2)
    x = np.abs(y) / c
    out = np.empty_like(x)
    # far out exp(rho y / c) overflows while K0 underflows; combine exponents there
    far = x > _K0_ASYM_X
    out[~far] = np.exp(y[~far] * p.rho / c) * bessel_k0(x[~far])
    out[far] = np.exp(y[far] * p.rho / c - x[far]) * _k0_scaled_asym(x[far])
    out /= math.pi * p.D
    return float(out) if out.ndim == 0 else out


_K0_ASYM_X = 500.0


def _k0_scaled_asym(x: np.ndarray) -> np.ndarray:
    """``exp(x) K0(x)`` from the large-x expansion; ~1e-16 relative for x > 500."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 8):
        term = term * (-(2 * k - 1) ** 2 / (8.0 * k * x))
        total = total + term
    return np.sqrt(np.pi / (2 * x)) * total


def product_pdf_quadrature(p: BivariateGaussianParams, y: float, n: int = 2001) -> QuadResult:
    """``int f(x1, y/x1) / |x1| dx1`` evaluated directly from the joint density.

    Each half line is mapped by ``x1 = +-exp(t)``, which turns the integrand
    into a doubly-exponentially decaying function of ``t`` centred where
    ``x1^2 = |y| sigma1 / sigma2``.
    """
    _require_centered(p)
    y = float(y)
    if y == 0:
        raise SingularityError("product density has a logarithmic singularity at y = 0")
    a = abs(y) / (p.sigma1 * p.sigma2 * (1 - p.rho**2))
    t0 = 0.5 * math.log(abs(y) * p.sigma1 / p.sigma2)
    # exponent grows like a (cosh(2 tau) - 1); stop where it reaches ~ 50
    half = 0.5 * math.acosh(1.0 + 50.0 / a)
    g = GridSpec(t0 - half, t0 + half, n)
    total = 0.0
    err = 0.0
    for sign in (1.0, -1.0):
        r = integrate_1d(lambda t: bivariate_gaussian_pdf(p, sign * np.exp(t), y / (sign * np.exp(t))), g)
        total += r.value
        err += r.error
    return QuadResult(total, err)


def product_pdf_mass(p: BivariateGaussianParams, n: int = 4001) -> QuadResult:
    """Total mass of the closed-form product density over the real line.

    ``y = +-exp(t)`` removes the log singularity at zero.
    """
    _require_centered(p)
    # y * f(y) ~ y log y below, f ~ exp(-(1 - |rho|) |y| / D) above
    g = GridSpec(math.log(p.D) - 40.0, math.log(p.D) + math.log(60.0 / (1.0 - abs(p.rho))), n)
    pos = integrate_1d(lambda y: product_pdf_gaussian(p, y), g, map="exp")
    neg = integrate_1d(lambda y: product_pdf_gaussian(p, -y), g, map="exp")
    return QuadResult(pos.value + neg.value, pos.error + neg.error)


def sum_charfn_gaussian(p: BivariateGaussianParams) -> CharFn:
    w = sum_pdf_gaussian(p)

    def evaluator(s):
        return np.exp(-0.5 * s * s * w.sigma**2 + 1j * s * w.mu)

    return CharFn(evaluator, name="gaussian_sum")


def product_charfn_gaussian(p: BivariateGaussianParams) -> CharFn:
    """``1 / sqrt(1 + s^2 (1 - rho^2) s1^2 s2^2 - 2 i s rho s1 s2)``, principal root."""
    _require_centered(p)
    c = p.rho * p.sigma1 * p.sigma2
    a = p.D**2

    def evaluator(s):
        return 1.0 / np.sqrt(1.0 + a * s * s - 2j * c * s)

    return CharFn(evaluator, name="gaussian_product")


def rvt_transform(
    joint: GridDensity2D,
    g: Callable,
    grid: GridSpec,
    s_max: float,
    *,
    tail_terms: int = 0,
) -> GridDensity:
    """Density of ``Y = g(X1, X2)`` via its characteristic function.

    ``phi_Y(s)`` is the 2-D trapezoid sum of ``exp(i s g) f``, then
    :func:`pdf_from_charfn` inverts it on ``grid``.
    """
    X, Y = np.meshgrid(joint.gx.points, joint.gy.points, indexing="ij")
    gv = np.asarray(g(X, Y), dtype=float).ravel()
    w = (joint.weights() * joint.values).ravel()
    w = w / w.sum()

    def evaluator(s):
        return fourier_sum(gv, w, s, 1.0)

    phi = CharFn(evaluator, name="rvt")
    return pdf_from_charfn(phi, grid, s_max, tail_terms=tail_terms)
