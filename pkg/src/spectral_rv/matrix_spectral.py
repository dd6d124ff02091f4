"""Finite-dimensional spectral theorem.

A Hermitian matrix is split into eigenvalues and orthogonal projectors,
``A = sum_i a_i P_i``. From that decomposition we get the spectral family
``E(lam) = sum_{a_i <= lam} P_i``, measurement statistics in a state, and
joint statistics for commuting pairs. Noncommuting pairs have no common
eigenbasis and are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NonHermitianError",
    "IncompatibleObservablesError",
    "HermitianOperator",
    "StateVector",
    "SpectralDecomposition",
    "DiscreteDistribution",
    "JointDistribution",
    "eigendecompose",
    "spectral_family_at",
    "measurement_distribution",
    "expectation",
    "cdf_at",
    "commutator",
    "joint_distribution",
    "simultaneous_eigenbasis",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

HERMITIAN_TOL = 1e-12
PROJECTOR_TOL = 1e-10


class NonHermitianError(ValueError):
    """Matrix fails the Hermiticity check; ``defect`` is max |A - A^dagger|."""

    def __init__(self, defect: float):
        self.defect = float(defect)
        super().__init__(f"matrix is not Hermitian: max|A - A^dagger| = {self.defect:.3e}")


class IncompatibleObservablesError(ValueError):
    """The two observables do not commute, so no joint distribution exists."""

    def __init__(self, commutator_norm: float, tol: float):
        self.commutator_norm = float(commutator_norm)
        self.tol = float(tol)
        super().__init__(
            f"operators do not commute: max|AB - BA| = {self.commutator_norm:.3e} "
            f"> tol {self.tol:.3e}; no common eigenbasis exists"
        )


def _maxabs(m) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("operator dimension must be >= 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator has non-finite entries")
        defect = _maxabs(a - a.conj().T)
        # absolute tolerance, scaled up only for matrices with large entries
        if defect > HERMITIAN_TOL * max(1.0, _maxabs(a)):
            raise NonHermitianError(defect)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_json(cls, doc: dict) -> "HermitianOperator":
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValueError("'re' and 'im' shapes differ")
        if "dim" in doc and re.shape != (doc["dim"], doc["dim"]):
            raise ValueError(f"'dim' = {doc['dim']} does not match entries of shape {re.shape}")
        return cls(re + 1j * im)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).ravel()
        if v.size < 1:
            raise ValueError("state dimension must be >= 1")
        norm = float(np.vdot(v, v).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized: <v|v> = {norm!r}")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        v = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(v / np.linalg.norm(v))

    @classmethod
    def from_json(cls, doc: dict) -> "StateVector":
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
        return cls(re + 1j * im)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    projectors: tuple
    dim: int
    # orthonormal eigenvectors per eigenvalue, columns; kept for joint bases
    eigenvectors: tuple = field(default=(), repr=False)

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for a, p in zip(self.eigenvalues, self.projectors):
            out += a * p
        return out

    def multiplicities(self) -> list[int]:
        return [v.shape[1] for v in self.eigenvectors]

    def check(self, tol: float = PROJECTOR_TOL) -> dict[str, float]:
        """Measured defects of the projector algebra (all should be <= tol)."""
        eye = np.eye(self.dim)
        idem = orth = herm = 0.0
        for i, p in enumerate(self.projectors):
            idem = max(idem, _maxabs(p @ p - p))
            herm = max(herm, _maxabs(p - p.conj().T))
            for q in self.projectors[i + 1:]:
                orth = max(orth, _maxabs(p @ q))
        complete = _maxabs(sum(self.projectors) - eye)
        return {"idempotence": idem, "orthogonality": orth, "hermiticity": herm,
                "completeness": complete}

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(a) for a in self.eigenvalues],
            "projectors": [{"re": p.real.tolist(), "im": p.imag.tolist()} for p in self.projectors],
        }


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability mass function on strictly ascending points."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        m = np.array(self.masses, dtype=float).ravel()
        if pts.shape != m.shape or pts.size == 0:
            raise ValueError("points and masses must be non-empty and of equal length")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly ascending")
        if np.any(m < 0):
            raise ValueError("masses must be non-negative")
        if abs(m.sum() - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {m.sum()!r}, not 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", m)

    def mean(self) -> float:
        return float(self.points @ self.masses)

    def variance(self) -> float:
        mu = self.mean()
        return float(((self.points - mu) ** 2) @ self.masses)

    def cdf(self, x: float) -> float:
        return float(self.masses[self.points <= x].sum())


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint PMF over pairs ``(a, b)``, listed in ascending lexicographic order."""

    pairs: np.ndarray  # shape (k, 2)
    masses: np.ndarray

    def marginal(self, axis: int, tol: float = 1e-9) -> DiscreteDistribution:
        vals = self.pairs[:, axis]
        order = np.argsort(vals, kind="stable")
        pts: list[float] = []
        ms: list[float] = []
        for v, m in zip(vals[order], self.masses[order]):
            if pts and abs(v - pts[-1]) <= tol * max(1.0, abs(v)):
                ms[-1] += m
            else:
                pts.append(float(v))
                ms.append(float(m))
        return DiscreteDistribution(pts, ms)


def _default_degeneracy_tol(w: np.ndarray) -> float:
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    return 1e-9 * scale if scale > 0 else 1e-12


def _group(w: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, a in enumerate(w):
        if groups and a - w[groups[-1][0]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first component with non-negligible modulus made real positive, per column
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12 * np.max(np.abs(col))))
        v[:, j] = col * (abs(col[k]) / col[k])
    return v


def eigendecompose(A, degeneracy_tol: float | None = None) -> SpectralDecomposition:
    """Eigenvalues (ascending, merged within ``degeneracy_tol``) and projectors."""
    if not isinstance(A, HermitianOperator):
        A = HermitianOperator(A)
    w, v = np.linalg.eigh(A.entries)
    tol = _default_degeneracy_tol(w) if degeneracy_tol is None else float(degeneracy_tol)
    eigvals, projs, vecs = [], [], []
    for idx in _group(w, tol):
        basis = _fix_phase(v[:, idx])
        p = basis @ basis.conj().T
        p = 0.5 * (p + p.conj().T)
        eigvals.append(float(np.mean(w[idx])))
        projs.append(p)
        vecs.append(basis)
    return SpectralDecomposition(np.array(eigvals), tuple(projs), A.dim, tuple(vecs))


def spectral_family_at(d: SpectralDecomposition, lam: float) -> np.ndarray:
    """``E(lam) = sum_i H(lam - a_i) P_i`` with ``H(0) = 1``."""
    out = np.zeros((d.dim, d.dim), dtype=complex)
    for a, p in zip(d.eigenvalues, d.projectors):
        if a <= lam:
            out += p
    return out


def _as_state(v) -> StateVector:
    return v if isinstance(v, StateVector) else StateVector(v)


def _quad_form(m: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.vdot(v, m @ v))


def measurement_distribution(d: SpectralDecomposition, v) -> DiscreteDistribution:
    v = _as_state(v)
    if v.dim != d.dim:
        raise ValueError(f"state dimension {v.dim} != operator dimension {d.dim}")
    masses = np.array([_quad_form(p, v.amplitudes).real for p in d.projectors])
    # roundoff can leave -1e-17 on an orthogonal eigenspace
    if np.any(masses < -1e-12):
        raise ValueError(f"negative probability {masses.min():.3e}; projectors are broken")
    masses = np.clip(masses, 0.0, None)
    return DiscreteDistribution(d.eigenvalues, masses)


def expectation(A, v) -> float:
    """``<v|A|v>``; the imaginary part must vanish to 1e-12 (relative to ||A||)."""
    if not isinstance(A, HermitianOperator):
        A = HermitianOperator(A)
    v = _as_state(v)
    if v.dim != A.dim:
        raise ValueError(f"state dimension {v.dim} != operator dimension {A.dim}")
    val = _quad_form(A.entries, v.amplitudes)
    if abs(val.imag) > 1e-12 * max(1.0, _maxabs(A.entries)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian")
    return val.real


def cdf_at(d: SpectralDecomposition, v, lam: float) -> float:
    v = _as_state(v)
    if v.dim != d.dim:
        raise ValueError(f"state dimension {v.dim} != operator dimension {d.dim}")
    return _quad_form(spectral_family_at(d, lam), v.amplitudes).real


def commutator(A, B) -> np.ndarray:
    a = A.entries if isinstance(A, HermitianOperator) else np.asarray(A, dtype=complex)
    b = B.entries if isinstance(B, HermitianOperator) else np.asarray(B, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    c = a @ b - b @ a
    scale = max(1.0, _maxabs(a) * _maxabs(b))
    if _maxabs(c + c.conj().T) > 1e-12 * scale:
        raise ValueError("commutator of Hermitian inputs is not anti-Hermitian")
    return c


def simultaneous_eigenbasis(A, B, tol: float | None = None):
    """Common eigenbasis of commuting Hermitian ``A`` and ``B``.

    Returns ``(a_vals, b_vals, basis)`` with one column of ``basis`` per
    joint eigenvector. ``B`` is diagonalised inside each eigenspace of ``A``.
    Raises :class:`IncompatibleObservablesError` if ``[A, B] != 0``.
    """
    if not isinstance(A, HermitianOperator):
        A = HermitianOperator(A)
    if not isinstance(B, HermitianOperator):
        B = HermitianOperator(B)
    if tol is None:
        tol = 1e-10 * max(_maxabs(A.entries) * _maxabs(B.entries), 1e-300)
    c = _maxabs(commutator(A, B))
    if c > tol:
        raise IncompatibleObservablesError(c, tol)
    da = eigendecompose(A)
    b_spec = eigendecompose(B).eigenvalues
    b_tol = _default_degeneracy_tol(b_spec)
    a_vals, b_vals, cols = [], [], []
    for a, basis in zip(da.eigenvalues, da.eigenvectors):
        sub = basis.conj().T @ B.entries @ basis
        sub = 0.5 * (sub + sub.conj().T)
        w, u = np.linalg.eigh(sub)
        for idx in _group(w, b_tol):
            vecs = _fix_phase(basis @ u[:, idx])
            bv = float(np.mean(w[idx]))
            # report B's own (merged) eigenvalue so both marginals share its points
            k = int(np.argmin(np.abs(b_spec - bv)))
            if abs(b_spec[k] - bv) <= max(b_tol, 1e-12):
                bv = float(b_spec[k])
            for j in range(vecs.shape[1]):
                a_vals.append(a)
                b_vals.append(bv)
                cols.append(vecs[:, j])
    return np.array(a_vals), np.array(b_vals), np.column_stack(cols)


def joint_distribution(A, B, v, tol: float | None = None) -> JointDistribution:
    """Joint PMF ``p(a_n, b_m) = sum |<a_n, b_m|v>|^2`` for commuting ``A``, ``B``."""
    v = _as_state(v)
    a_vals, b_vals, basis = simultaneous_eigenbasis(A, B, tol)
    if v.dim != basis.shape[0]:
        raise ValueError(f"state dimension {v.dim} != operator dimension {basis.shape[0]}")
    amps = np.abs(basis.conj().T @ v.amplitudes) ** 2
    pairs: list[tuple[float, float]] = []
    masses: list[float] = []
    for a, b, m in zip(a_vals, b_vals, amps):
        if pairs and pairs[-1] == (a, b):
            masses[-1] += m
        else:
            pairs.append((a, b))
            masses.append(float(m))
    order = sorted(range(len(pairs)), key=lambda i: pairs[i])
    return JointDistribution(np.array([pairs[i] for i in order]), np.array([masses[i] for i in order]))

