"""Named numerical checks, grouped into suites, for the ``verify`` command.

Every check records what was measured, what was expected and the
tolerance, so a report line can be read without the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import classical_rv as crv
from . import matrix_spectral as ms
from . import oscillator as osc
from .io import format_number
from .numerics import GridSpec, bessel_k0, integrate_1d, mc_mean

SUITES = ("spectral", "classical", "quantum")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    expected: float
    tolerance: float

    def line(self) -> str:
        status = "pass" if self.passed else "fail"
        return (f"{self.name}: {status} measured={format_number(self.measured)} "
                f"expected={format_number(self.expected)} tol={format_number(self.tolerance)}")


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = [c.line() for c in self.checks]
        out.append(f"overall: {'pass' if self.passed else 'fail'}")
        return out


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    mc_n: int = 1_000_000
    grid: GridSpec = osc.DEFAULT_QUASI_GRID
    params: osc.OscillatorParams = osc.OscillatorParams()


def _close(name, measured, expected, tol) -> Check:
    measured = float(measured)
    return Check(name, bool(abs(measured - expected) <= tol), measured, float(expected), float(tol))


def _small(name, defect, tol) -> Check:
    return _close(name, defect, 0.0, tol)


# -- spectral ---------------------------------------------------------------

def random_commuting_pair(rng: np.random.Generator, dim: int, kind: str = "polynomial"):
    """Two commuting Hermitian matrices.

    ``kind="polynomial"`` returns ``(H, c0 + c1 H + c2 H^2)`` for a random
    Hermitian ``H``. ``kind="degenerate"`` shares a random unitary
    eigenbasis with small-integer eigenvalues, so repeated eigenvalues
    turn up often.
    """
    if kind == "polynomial":
        H = random_hermitian(rng, dim)
        c = rng.standard_normal(3)
        B = c[0] * np.eye(dim) + c[1] * H + c[2] * (H @ H)
        return H, 0.5 * (B + B.conj().T)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    a = rng.integers(-2, 3, dim).astype(float)
    b = rng.integers(-2, 3, dim).astype(float)
    A = q @ np.diag(a) @ q.conj().T
    B = q @ np.diag(b) @ q.conj().T
    return 0.5 * (A + A.conj().T), 0.5 * (B + B.conj().T)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)


def random_state(rng: np.random.Generator, dim: int) -> ms.StateVector:
    return ms.StateVector.normalized(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def marginal_defect(joint: ms.JointDistribution, A, B, v) -> float:
    """Largest mismatch between the joint's marginals and the direct PMFs of ``A`` and ``B``."""
    worst = 0.0
    for axis, op in ((0, A), (1, B)):
        direct = ms.measurement_distribution(ms.eigendecompose(op), v)
        marg = joint.marginal(axis)
        if marg.points.size != direct.points.size:
            return math.inf
        worst = max(worst, float(np.max(np.abs(marg.points - direct.points))),
                    float(np.max(np.abs(marg.masses - direct.masses))))
    return worst


def spectral_suite(cfg: VerifyConfig) -> list[Check]:
    d = ms.eigendecompose(ms.PAULI_Y)
    eye = np.eye(2)
    proj_err = max(np.max(np.abs(d.projectors[0] - (eye - ms.PAULI_Y) / 2)),
                   np.max(np.abs(d.projectors[1] - (eye + ms.PAULI_Y) / 2)))
    eig_err = float(np.max(np.abs(d.eigenvalues - np.array([-1.0, 1.0]))))
    checks = [
        Check("pauli_y_eigenvalues", eig_err == 0.0, eig_err, 0.0, 0.0),
        _small("pauli_y_projectors", proj_err, 1e-12),
        _small("pauli_y_reconstruction", np.max(np.abs(d.reconstruct() - ms.PAULI_Y)), 1e-12),
        _close("pauli_y_cdf_at_0", ms.cdf_at(d, [1.0, 0.0], 0.0), 0.5, 1e-12),
    ]
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for i in range(100):
        dim = int(rng.integers(2, 7))
        A, B = random_commuting_pair(rng, dim, "polynomial" if i % 2 == 0 else "degenerate")
        v = random_state(rng, dim)
        worst = max(worst, marginal_defect(ms.joint_distribution(A, B, v), A, B, v))
    checks.append(_small("commuting_pairs_marginal_consistency", worst, 1e-10))
    rejected = 0
    for _ in range(100):
        dim = int(rng.integers(2, 7))
        try:
            ms.joint_distribution(random_hermitian(rng, dim), random_hermitian(rng, dim),
                                  random_state(rng, dim))
        except ms.IncompatibleObservablesError:
            rejected += 1
    checks.append(_close("noncommuting_pairs_rejected", rejected, 100, 0))
    try:
        ms.joint_distribution(ms.PAULI_X, ms.PAULI_Y, [1.0, 0.0])
        pauli_rejected = 0
    except ms.IncompatibleObservablesError:
        pauli_rejected = 1
    checks.append(_close("pauli_xy_rejected", pauli_rejected, 1, 0))
    return checks


# -- classical --------------------------------------------------------------

MC_PARAMS = crv.BivariateGaussianParams(mu1=0.3, mu2=-0.7, sigma1=1.0, sigma2=2.0, rho=0.5)
FIG_PARAMS = crv.BivariateGaussianParams(sigma1=1 / math.sqrt(2), sigma2=1 / math.sqrt(2), rho=0.0)


def _k0_oracle_defect() -> float:
    worst = 0.0
    for x in (0.01, 0.1, 0.5, 1.0, 1.999, 2.0, 2.001, 5.0, 20.0, 50.0):
        # K0(x) = int_0^inf exp(-x cosh t) dt; integrate the even extension and halve
        t_max = math.acosh(1.0 + 40.0 / x)
        g = GridSpec(-t_max, t_max, 4001)
        ref = 0.5 * integrate_1d(lambda t: np.exp(-x * np.cosh(t)), g).value
        worst = max(worst, abs(bessel_k0(x) / ref - 1.0))
    return worst


def _mc_sampler(p):
    def sampler(rng, n):
        z = rng.standard_normal((n, 2))
        x1 = p.mu1 + p.sigma1 * z[:, 0]
        x2 = p.mu2 + p.sigma2 * (p.rho * z[:, 0] + math.sqrt(1 - p.rho**2) * z[:, 1])
        return x1, x2
    return sampler


def _mc_check(name, est, target) -> Check:
    z = abs(est.mean - target) / est.std_error
    return Check(name, bool(z <= 4.0), est.mean, target, 4.0 * est.std_error)


def classical_suite(cfg: VerifyConfig) -> list[Check]:
    checks = [
        _close("k0_at_1", bessel_k0(1.0), 0.42102443824070834, 1e-12 * 0.42102443824070834),
        _small("k0_vs_integral_oracle_rel", _k0_oracle_defect(), 1e-12),
    ]
    ys = np.linspace(0.05, 4.0, 20)
    closed = crv.product_pdf_gaussian(FIG_PARAMS, ys)
    quad = np.array([crv.product_pdf_quadrature(FIG_PARAMS, y).value for y in ys])
    checks.append(_small("product_closed_vs_quadrature_rel", np.max(np.abs(closed / quad - 1)), 1e-7))
    checks.append(_close("product_fig1_at_0.5", crv.product_pdf_gaussian(FIG_PARAMS, 0.5),
                         2 / math.pi * 0.42102443824070834, 1e-12))
    checks.append(_close("product_mass", crv.product_pdf_mass(FIG_PARAMS).value, 1.0, 1e-5))
    tilted = crv.BivariateGaussianParams(sigma1=1.0, sigma2=2.0, rho=-0.6)
    checks.append(_close("product_mass_correlated", crv.product_pdf_mass(tilted).value, 1.0, 1e-5))

    sampler = _mc_sampler(MC_PARAMS)
    p = MC_PARAMS
    checks.append(_mc_check("mc_product_moment",
                            mc_mean(sampler, lambda xs: (xs[0] - p.mu1) * (xs[1] - p.mu2), cfg.mc_n, cfg.seed),
                            p.rho * p.sigma1 * p.sigma2))
    checks.append(_mc_check("mc_sum_mean", mc_mean(sampler, lambda xs: xs[0] + xs[1], cfg.mc_n, cfg.seed),
                            p.mu1 + p.mu2))

    g = GridSpec(-8.0, 8.0, 4001)
    normal = crv.GridDensity.from_function(crv.normal_pdf, g)
    back = crv.pdf_from_charfn(crv.charfn_from_pdf(normal), g, 10.0)
    checks.append(_small("charfn_roundtrip_normal", np.max(np.abs(back.values - normal.values)), 1e-6))
    centered = crv.BivariateGaussianParams(sigma1=1.0, sigma2=2.0, rho=0.5)
    m1 = crv.moment_from_charfn(crv.product_charfn_gaussian(centered), 1)
    checks.append(_close("product_charfn_first_moment", m1, 1.0, 1e-5))
    return checks


# -- quantum ----------------------------------------------------------------

def fig4_curves(s, p: crv.BivariateGaussianParams = FIG_PARAMS):
    phi_u = np.asarray(osc.u_charfn(s), dtype=float)
    phi_y = crv.product_charfn_gaussian(p)(s).real
    return phi_u, phi_y


def quantum_suite(cfg: VerifyConfig) -> list[Check]:
    prm = cfg.params
    grid = cfg.grid
    checks = [_close("q0_p0_equals_hbar", prm.q0 * prm.p0, prm.hbar, 1e-14 * prm.hbar)]

    f = osc.quasi_density("f", grid)
    g = osc.quasi_density("g", grid)
    checks.append(_close("quasi_f_integral", f.integral(), 1.0, 1e-6))
    checks.append(_small("quasi_g_integral", g.integral(), 1e-8))
    inner = np.abs(f.x) <= 4.0
    target = np.exp(-f.x**2) / math.sqrt(math.pi)
    checks.append(_small("quasi_f_marginal_x", np.max(np.abs(f.marginal_x() - target)[inner]), 1e-6))
    checks.append(_small("quasi_f_marginal_y", np.max(np.abs(f.marginal_y() - target)[inner]), 1e-6))
    neg = float(f.values.min())
    checks.append(Check("quasi_f_negative", neg < -1e-3 * float(f.values.max()), neg,
                        -1e-3 * float(f.values.max()), 0.0))
    checks.append(_small("sum_expectation_quasi", osc.sum_expectation_via_quasi(grid), 1e-8))

    s = np.linspace(-4.0, 4.0, 81)
    dual = np.abs(osc.sum_charfn_quantum(s, "quadrature", grid) - osc.sum_charfn_quantum(s))
    checks.append(_small("sum_charfn_dual_route", np.max(dual), 1e-6))
    w = osc.sum_pdf_quantum()
    checks.append(_small("sum_pdf_standard_normal", np.max(np.abs(w.values - crv.normal_pdf(w.x))), 1e-6))
    classical_sum = crv.sum_pdf_gaussian(FIG_PARAMS).pdf(w.x)
    checks.append(_small("sum_pdf_matches_classical", np.max(np.abs(w.values - classical_sum)), 1e-6))

    xy = osc.xy_expectation()
    checks.append(_small("xy_expectation", abs(xy - 0.5j), 1e-14))
    n_max = 10
    Q = osc.position_matrix(n_max, prm.q0)
    P = osc.momentum_matrix(n_max, prm.p0)
    comm = (Q @ P - P @ Q)[:n_max, :n_max]
    checks.append(_small("commutator_qp", np.max(np.abs(comm - 1j * prm.hbar * np.eye(n_max))), 1e-10))
    v = osc.v_pdf()
    checks.append(Check("v_expectation", v.mean() == 0.5, v.mean(), 0.5, 0.0))
    checks.append(_small("v_variance", v.variance(), 0.0))

    u_quasi, v_quasi = osc.product_expectations_via_quasi(grid)
    checks.append(_small("u_expectation_quasi", u_quasi, 1e-8))
    checks.append(_close("v_expectation_quasi", v_quasi, 0.5, 1e-8))
    checks.append(_small("u_expectation_charfn", crv.moment_from_charfn(osc.u_char(), 1), 1e-8))

    r = np.linspace(0.0, 2.0, 21)
    c0 = np.array([osc.squeezed_vacuum_coeffs(x, 0.0, 80).coeffs[0].real for x in r])
    checks.append(_small("squeezed_c0_identity", np.max(np.abs(c0 - np.cosh(r) ** -0.5)), 1e-15))
    checks.append(_small("squeezed_norm_r1_nmax80",
                         osc.squeezed_vacuum_coeffs(1.0, 0.0, 80).tail_mass, 1e-8))
    checks.append(_small("squeezed_norm_r2_nmax300",
                         osc.squeezed_vacuum_coeffs(2.0, 0.0, 300).tail_mass, 1e-8))

    fu = osc.u_pdf()
    checks.append(_close("u_pdf_integral", fu.integral(), 1.0, 1e-6))
    checks.append(_small("u_pdf_symmetry", np.max(np.abs(fu.values - fu.values[::-1])), 1e-10))
    checks.append(_small("u_pdf_mean", fu.grid.weights() @ (fu.x * fu.values), 1e-8))

    s4 = GridSpec(-10.0, 10.0, 2001).points
    phi_u, phi_y = fig4_curves(s4)
    checks.append(_small("fig4_order_excess", max(0.0, float(np.max(phi_u - phi_y))), 0.0))
    gap = float(np.min((phi_y - phi_u)[np.abs(s4) >= 0.5]))
    checks.append(Check("fig4_strict_gap", gap > 0.0, gap, 0.0, 0.0))
    return checks


_SUITES: dict[str, Callable[[VerifyConfig], list[Check]]] = {
    "spectral": spectral_suite,
    "classical": classical_suite,
    "quantum": quantum_suite,
}


def run(suite: str = "all", cfg: VerifyConfig = VerifyConfig()) -> VerificationReport:
    names = SUITES if suite == "all" else (suite,)
    report = VerificationReport()
    for name in names:
        if name not in _SUITES:
            raise ValueError(f"unknown suite {name!r}")
        report.checks.extend(_SUITES[name](cfg))
    return report
