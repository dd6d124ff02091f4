import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import special

from spectral_rv import _backend, _kernels_py


def _naive_fourier(x, w, s, sign):
    return np.exp(1j * sign * np.multiply.outer(s, x)) @ w


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_fourier_sum_matches_naive(kernels, sign):
    rng = np.random.default_rng(3)
    x = rng.uniform(-5, 5, 300)
    w = rng.standard_normal(300) + 1j * rng.standard_normal(300)
    s = rng.uniform(-20, 20, 50)
    got = kernels.fourier_sum(x, w, s, sign)
    assert np.max(np.abs(got - _naive_fourier(x, w, s, sign))) <= 1e-11 * np.abs(w).sum()


def test_fourier_sum_empty_inputs(kernels):
    out = kernels.fourier_sum(np.zeros(0), np.zeros(0, complex), np.array([1.0, 2.0]), 1.0)
    assert np.array_equal(out, np.zeros(2, complex))
    assert kernels.fourier_sum(np.ones(3), np.ones(3, complex), np.zeros(0), 1.0).shape == (0,)


def test_fourier_sum_is_deterministic(kernels):
    rng = np.random.default_rng(5)
    x = rng.standard_normal(2000)
    w = rng.standard_normal(2000) + 0j
    s = np.linspace(-3, 3, 31)
    assert np.array_equal(kernels.fourier_sum(x, w, s, 1.0), kernels.fourier_sum(x, w, s, 1.0))


def test_bessel_k0_against_scipy(kernels):
    x = np.logspace(-6, np.log10(50), 400)
    rel = np.abs(kernels.bessel_k0(x, 2.0) / special.k0(x) - 1)
    assert rel.max() <= 1e-12


def test_bessel_k0_continuous_at_split(kernels):
    below = kernels.bessel_k0(np.array([2.0]), 2.0 + 1e-12)[0]  # series branch
    above = kernels.bessel_k0(np.array([2.0]), 2.0)[0]  # continued fraction branch
    assert abs(below / above - 1) <= 1e-12


def test_backends_agree():
    compiled = pytest.importorskip("spectral_rv._kernels")
    rng = np.random.default_rng(11)
    x = rng.uniform(-8, 8, 5000)
    w = rng.standard_normal(5000) * (1 + 0.5j)
    s = np.linspace(-30, 30, 101)
    a = compiled.fourier_sum(x, w, s, -1.0)
    b = _kernels_py.fourier_sum(x, w, s, -1.0)
    assert np.max(np.abs(a - b)) <= 1e-11 * np.abs(w).sum()
    z = np.logspace(-5, 1.7, 200)
    assert np.max(np.abs(compiled.bessel_k0(z, 2.0) / _kernels_py.bessel_k0(z, 2.0) - 1)) <= 1e-14


def test_env_var_forces_fallback():
    env = dict(os.environ, SPECTRAL_RV_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import spectral_rv; print(spectral_rv.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_wrapper_coerces_dtypes():
    out = _backend.fourier_sum([0.0, 1.0], [1, 1], [0.0], 1.0)
    assert out.dtype == np.complex128 and out[0] == 2.0
