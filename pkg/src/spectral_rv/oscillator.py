"""Harmonic oscillator ground state and the (X, Y) = (Q/q0, P/p0) pair.

X and Y do not commute (``[X, Y] = i``), so there is no joint PDF for
them. This module builds the signed quasi-density ``f`` and its partner
``g`` from ``z(x, y) = <0|x><x|y><y|0>``, and the characteristic
functions and densities of ``X + Y`` and ``U = (XY + YX) / 2``.

All quasi-density work uses the dimensionless ``x = q/q0``, ``y = p/p0``;
functions return ``hbar * f`` etc., which is independent of the units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical_rv import CharFn, GridDensity, pdf_from_charfn
from .matrix_spectral import DiscreteDistribution, eigendecompose, measurement_distribution
from .numerics import GridSpec, fourier_sum

__all__ = [
    "TruncationError",
    "QuadratureError",
    "OscillatorParams",
    "QuasiDensity2D",
    "FockCoeffs",
    "DEFAULT_QUASI_GRID",
    "ground_density_q",
    "ground_density_p",
    "overlap_qp",
    "quasi_z",
    "quasi_f",
    "quasi_g",
    "quasi_density",
    "sum_expectation_via_quasi",
    "product_expectations_via_quasi",
    "sum_charfn_quantum",
    "sum_charfn",
    "sum_pdf_quantum",
    "position_matrix",
    "momentum_matrix",
    "xy_expectation",
    "v_pdf",
    "u_charfn",
    "u_char",
    "u_spectral_measure",
    "u_pdf",
    "squeezed_vacuum_coeffs",
]

DEFAULT_QUASI_GRID = GridSpec(-6.0, 6.0, 601)
_Z0 = 1.0 / (math.sqrt(2.0) * math.pi)


class TruncationError(RuntimeError):
    """A truncated Fock expansion lost more norm than allowed."""


class QuadratureError(RuntimeError):
    """Grid quadrature did not converge."""


@dataclass(frozen=True)
class OscillatorParams:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "omega"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def q0(self) -> float:
        return math.sqrt(self.hbar / (self.mass * self.omega))

    @property
    def p0(self) -> float:
        return self.hbar / self.q0

    @classmethod
    def from_config(cls, cfg: dict) -> "OscillatorParams":
        return cls(**{k: float(cfg[k]) for k in ("hbar", "mass", "omega") if k in cfg})


def ground_density_q(params: OscillatorParams, q):
    """``|psi_Q(q)|^2``, a normal density with variance ``q0^2 / 2``."""
    q0 = params.q0
    return np.exp(-(np.asarray(q, dtype=float) / q0) ** 2) / (math.sqrt(math.pi) * q0)


def ground_density_p(params: OscillatorParams, p):
    p0 = params.p0
    return np.exp(-(np.asarray(p, dtype=float) / p0) ** 2) / (math.sqrt(math.pi) * p0)


def overlap_qp(params: OscillatorParams, q, p):
    """``<q|p> = exp(i q p / hbar) / sqrt(2 pi hbar)``."""
    h = params.hbar
    return np.exp(1j * np.asarray(q, dtype=float) * np.asarray(p, dtype=float) / h) / math.sqrt(
        2 * math.pi * h
    )


def quasi_z(x, y):
    """``hbar z`` for the ground state: ``exp(-(x^2 + y^2)/2 + i x y) / (sqrt(2) pi)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _Z0 * np.exp(-0.5 * (x * x + y * y) + 1j * x * y)


def quasi_f(x, y):
    """Real part of :func:`quasi_z`: the quasi-probability. Takes negative values."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _Z0 * np.exp(-0.5 * (x * x + y * y)) * np.cos(x * y)


def quasi_g(x, y):
    """Imaginary part of :func:`quasi_z`; integrates to zero."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _Z0 * np.exp(-0.5 * (x * x + y * y)) * np.sin(x * y)


@dataclass(frozen=True, eq=False)
class QuasiDensity2D:
    """Signed function on ``gx x gy`` in dimensionless variables.

    ``values`` hold ``hbar * f``; divide by ``hbar`` for the dimensional
    object on the ``(q, p)`` plane.
    """

    gx: GridSpec
    gy: GridSpec
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.gx.n, self.gy.n):
            raise ValueError(f"expected shape {(self.gx.n, self.gy.n)}, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.gx.points

    @property
    def y(self) -> np.ndarray:
        return self.gy.points

    def integrate(self, weight=None) -> float:
        """``sum w_i w_j h(x_i, y_j) values_ij``; ``weight(X, Y)`` defaults to 1."""
        v = self.values
        if weight is not None:
            X, Y = np.meshgrid(self.x, self.y, indexing="ij")
            v = v * weight(X, Y)
        return float(self.gx.weights() @ v @ self.gy.weights())

    def integral(self) -> float:
        return self.integrate()

    def marginal_x(self) -> np.ndarray:
        return self.values @ self.gy.weights()

    def marginal_y(self) -> np.ndarray:
        return self.gx.weights() @ self.values

    def write_csv(self, path):
        from .io import write_csv

        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return write_csv(path, ("x", "y", "f"), [X, Y, self.values])


def quasi_density(kind: str = "f", grid: GridSpec = DEFAULT_QUASI_GRID,
                  grid_y: GridSpec | None = None, hbar: float = 1.0) -> QuasiDensity2D:
    fn = {"f": quasi_f, "g": quasi_g}[kind]
    gy = grid if grid_y is None else grid_y
    X, Y = np.meshgrid(grid.points, gy.points, indexing="ij")
    return QuasiDensity2D(grid, gy, fn(X, Y), hbar)


def sum_expectation_via_quasi(grid: GridSpec = DEFAULT_QUASI_GRID) -> float:
    """``<X + Y>`` as ``int int (x + y) f``."""
    return quasi_density("f", grid).integrate(lambda x, y: x + y)


def product_expectations_via_quasi(grid: GridSpec = DEFAULT_QUASI_GRID) -> tuple[float, float]:
    """``(<U>, <V>)`` as ``int int x y f`` and ``int int x y g``."""
    u = quasi_density("f", grid).integrate(lambda x, y: x * y)
    v = quasi_density("g", grid).integrate(lambda x, y: x * y)
    return u, v


def sum_charfn_quantum(s, route: str = "closed", grid: GridSpec = DEFAULT_QUASI_GRID,
                       tol: float = 1e-7):
    """``<0| exp(i s (X + Y)) |0>``.

    ``route="closed"`` gives ``exp(-s^2/2)``. ``route="quadrature"`` splits
    the exponential with the BCH identity and integrates
    ``exp(i s^2 / 2) int int exp(i s (x + y)) z(x, y)`` on ``grid``; the
    same sum on the every-other-point subgrid must agree within ``tol`` or
    :class:`QuadratureError` is raised.
    """
    s = np.asarray(s, dtype=float)
    if route == "closed":
        out = np.exp(-0.5 * s * s) + 0j
    elif route == "quadrature":
        flat = s.ravel()
        fine = _bch_sum(flat, grid)
        coarse = _bch_sum(flat, GridSpec(grid.lo, grid.hi, (grid.n + 1) // 2))
        gap = float(np.max(np.abs(fine - coarse), initial=0.0))
        if gap > tol:
            raise QuadratureError(f"quasi-density quadrature unconverged: h vs 2h differ by {gap:.3e}")
        out = fine.reshape(s.shape)
    else:
        raise ValueError(f"unknown route {route!r}")
    return complex(out) if out.ndim == 0 else out


def _bch_sum(s: np.ndarray, grid: GridSpec) -> np.ndarray:
    X, Y = np.meshgrid(grid.points, grid.points, indexing="ij")
    w = np.outer(grid.weights(), grid.weights()) * quasi_z(X, Y)
    return np.exp(0.5j * s * s) * fourier_sum((X + Y).ravel(), w.ravel(), s, 1.0)


def sum_charfn(route: str = "closed", grid: GridSpec = DEFAULT_QUASI_GRID) -> CharFn:
    return CharFn(lambda s: sum_charfn_quantum(s, route, grid), name=f"quantum_sum_{route}")


def sum_pdf_quantum(grid: GridSpec = GridSpec(-8.0, 8.0, 1601), s_max: float = 10.0,
                    route: str = "closed") -> GridDensity:
    """Density of ``X + Y`` in ``|0>`` by inverting :func:`sum_charfn_quantum`."""
    return pdf_from_charfn(sum_charfn(route), grid, s_max)


# -- Fock space -------------------------------------------------------------

def position_matrix(n_max: int, q0: float = 1.0) -> np.ndarray:
    """``<n'|Q|n>`` for ``n, n' = 0..n_max``."""
    off = q0 / math.sqrt(2.0) * np.sqrt(np.arange(1, n_max + 1))
    return (np.diag(off, 1) + np.diag(off, -1)).astype(complex)


def momentum_matrix(n_max: int, p0: float = 1.0) -> np.ndarray:
    """``<n'|P|n>`` for ``n, n' = 0..n_max``."""
    off = p0 / (math.sqrt(2.0) * 1j) * np.sqrt(np.arange(1, n_max + 1))
    return np.diag(off, 1) - np.diag(off, -1)


def xy_expectation(n_max: int = 2) -> complex:
    """``<0|X Y|0> = sum_n <0|X|n><n|Y|0>`` in the truncated Fock basis."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    X = position_matrix(n_max)
    Y = momentum_matrix(n_max)
    return complex(np.sum(X[0, :] * Y[:, 0]))


def v_pdf(n_max: int = 8) -> DiscreteDistribution:
    """Distribution of ``V = (XY - YX) / 2i`` in ``|0>``.

    The top Fock level carries a truncation artifact, so ``V`` is taken on
    levels ``0..n_max-1`` only, where it equals ``I/2`` exactly.
    """
    X = position_matrix(n_max)
    Y = momentum_matrix(n_max)
    V = ((X @ Y - Y @ X) / 2j)[:n_max, :n_max]
    d = eigendecompose(V)
    ground = np.zeros(n_max, dtype=complex)
    ground[0] = 1.0
    return measurement_distribution(d, ground)


@dataclass(frozen=True, eq=False)
class FockCoeffs:
    """Amplitudes ``c_n`` on the even Fock states ``|2n>``, ``n = 0..n_max``."""

    n_max: int
    coeffs: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    @property
    def tail_mass(self) -> float:
        return 1.0 - self.norm


def squeezed_vacuum_coeffs(r: float, phi: float = 0.0, n_max: int = 80,
                           tol: float | None = None) -> FockCoeffs:
    """Squeezed vacuum ``S(r e^{i phi})|0>`` expanded on ``|2n>``.

    ``c_n = (cosh r)^{-1/2} sqrt((2n)!)/n! (-e^{i phi} tanh(r) / 2)^n``,
    accumulated in log space. If ``tol`` is given and the truncated norm
    falls short of one by more than ``tol``, raises :class:`TruncationError`.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n = np.arange(1, n_max + 1)
    c = np.zeros(n_max + 1, dtype=complex)
    c[0] = 1.0 / math.sqrt(math.cosh(r))
    t = math.tanh(r)
    if t > 0:
        steps = 0.5 * np.log(2.0 * n * (2.0 * n - 1.0)) - np.log(n) + math.log(0.5 * t)
        logmag = -0.5 * math.log(math.cosh(r)) + np.cumsum(steps)
        phase = np.exp(1j * n * (phi + math.pi))
        c[1:] = np.exp(logmag) * phase
    out = FockCoeffs(n_max, c)
    if tol is not None and out.tail_mass > tol:
        raise TruncationError(
            f"squeezed vacuum r={r}: truncation at n_max={n_max} loses {out.tail_mass:.3e} of the norm"
        )
    return out


def u_spectral_measure(n_levels: int = 400) -> DiscreteDistribution:
    """Spectral measure of ``U = (a^2 - a^dag^2) / 2i`` in ``|0>``, truncated.

    ``U`` only couples even Fock states, so it is diagonalised on
    ``|0>, |2>, ..., |2(n_levels-1)>``. The result is a discrete
    approximation of the law of ``U``; its characteristic function matches
    ``(cosh s)^{-1/2}`` while the evolved state stays clear of the cutoff.
    """
    k = np.arange(1, n_levels)
    # <2k-2| a^2 |2k> = sqrt(2k (2k-1))
    amp = np.sqrt(2.0 * k * (2.0 * k - 1.0))
    A2 = np.diag(amp, 1)
    U = (A2 - A2.T) / 2j
    w, vecs = np.linalg.eigh(U)
    masses = np.abs(vecs[0, :]) ** 2
    masses = masses / masses.sum()
    return DiscreteDistribution(w, masses)


def u_charfn(s, route: str = "closed", n_max: int = 400, n_levels: int = 400):
    """``phi_U(s) = <0| exp(i s U) |0>``.

    Routes: ``"closed"`` is ``(cosh s)^{-1/2}``; ``"squeezed"`` reads the
    vacuum amplitude ``c_0`` of the squeezed vacuum with ``zeta = s`` and
    insists that the truncated expansion keeps its norm to 1e-6;
    ``"spectral"`` sums ``exp(i s u_k)`` over :func:`u_spectral_measure`.
    """
    s = np.asarray(s, dtype=float)
    if route == "closed":
        out = 1.0 / np.sqrt(np.cosh(s))
    elif route == "squeezed":
        flat = s.ravel()
        out = np.empty(flat.shape)
        for i, si in enumerate(flat):
            fc = squeezed_vacuum_coeffs(abs(si), 0.0 if si >= 0 else math.pi, n_max, tol=1e-6)
            out[i] = fc.coeffs[0].real
        out = out.reshape(s.shape)
    elif route == "spectral":
        m = u_spectral_measure(n_levels)
        out = fourier_sum(m.points, m.masses.astype(complex), s.ravel(), 1.0).reshape(s.shape)
    else:
        raise ValueError(f"unknown route {route!r}")
    return out.item() if out.ndim == 0 else out


def u_char(route: str = "closed") -> CharFn:
    return CharFn(lambda s: np.asarray(u_charfn(s, route), dtype=complex), name=f"u_{route}")


def u_pdf(grid: GridSpec = GridSpec(-15.0, 15.0, 3001), s_max: float = 60.0) -> GridDensity:
    """Density of ``U`` by Fourier inversion of ``(cosh s)^{-1/2}``."""
    if s_max < 40:
        raise ValueError("s_max must be >= 40; (cosh s)^{-1/2} decays only like exp(-s/2)")
    return pdf_from_charfn(u_char("closed"), grid, s_max)
