"""Quantum channels in Kraus form and the dephasing channel family.

A channel commuting with a copy isometry acts entrywise in that basis:
rho |-> conj(B) o rho, where B is a positive semidefinite matrix with
unit diagonal (unit diagonal <=> trace preservation) and ``o`` is the
Schur product.  The Kraus operators come from the spectral decomposition
B = sum_s x_s x_s^dag:

    k_s = sum_j <x_s|b_j> b_j b_j^dag

which is diagonal in the structure's basis.  Populations are untouched;
coherences are damped or rotated.

Concrete families:

* ``qubit_dephasing_B(gamma, phi)``:  [[1, e^{-g-ip}], [e^{-g+ip}, 1]],
  equivalently a phase flip with probability p = (1 - e^{-gamma})/2
  conjugated by a z rotation.
* ``pure_phase_B(phases)``:  rank one, a unitary phase rotation.
* ``dephasing_family_B(spec)``:  vectors built on the d-th roots of
  unity with weights r_s >= 0, sum r_s = 1; interpolates between the
  two above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classical import ClassicalStructure
from .linalg import (
    as_complex_matrix,
    dagger,
    hermitian_defect,
    hermitian_eig,
    hermitianize,
    max_abs,
)

__all__ = [
    "CorrelationMatrix",
    "CptpReport",
    "DephasingFamilySpec",
    "QuantumChannel",
    "apply_schur",
    "dephasing_family_B",
    "dephasing_family_vectors",
    "lift_operator",
    "phase_flip_probability",
    "pure_phase_B",
    "qubit_dephasing_B",
    "qubit_dephasing_B_derivative",
    "qubit_phase_flip_channel",
    "random_correlation_matrix",
    "schur_channel",
    "validate_state",
]

_EIGENVALUE_CUTOFF = 1e-12


def validate_state(rho: np.ndarray, tol: float = 1e-8, name: str = "state") -> np.ndarray:
    """Check that ``rho`` is a density matrix within ``tol``.

    Raises with the violated invariant named: Hermiticity, unit trace,
    or positivity.
    """
    rho = as_complex_matrix(rho, name)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be square, got shape {rho.shape}")
    defect = hermitian_defect(rho)
    if defect > tol:
        raise ValueError(f"{name} is not Hermitian: max asymmetry {defect:.3e} > tol {tol:.3e}")
    trace_err = abs(complex(np.trace(rho)) - 1.0)
    if trace_err > tol:
        raise ValueError(f"{name} does not have unit trace: |tr - 1| = {trace_err:.3e} > tol {tol:.3e}")
    min_eig = float(np.linalg.eigvalsh(hermitianize(rho))[0])
    if min_eig < -tol:
        raise ValueError(f"{name} is not positive semidefinite: min eigenvalue {min_eig:.3e}")
    return rho


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive map as a list of Kraus operators.

    Trace preservation is not enforced at construction (lifted operators
    may be non-unitary); ``cptp_report`` measures it.
    """

    dim_in: int
    dim_out: int
    kraus: tuple

    def __post_init__(self):
        if self.dim_in < 1 or self.dim_out < 1:
            raise ValueError(f"dimensions must be positive, got {self.dim_in}, {self.dim_out}")
        if not self.kraus:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = []
        for i, op in enumerate(self.kraus):
            op = as_complex_matrix(op, f"Kraus operator {i}")
            if op.shape != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"Kraus operator {i} has shape {op.shape}, "
                    f"expected ({self.dim_out}, {self.dim_in})"
                )
            ops.append(_frozen(op))
        object.__setattr__(self, "kraus", tuple(ops))

    @classmethod
    def from_kraus(cls, ops: Sequence[np.ndarray]) -> "QuantumChannel":
        first = as_complex_matrix(ops[0], "Kraus operator 0")
        return cls(dim_in=first.shape[1], dim_out=first.shape[0], kraus=tuple(ops))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """sum_t k_t rho k_t^dag on a validated input state."""
        rho = as_complex_matrix(rho, "rho")
        if rho.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"state shape {rho.shape} does not match input dimension {self.dim_in}")
        validate_state(rho, name="rho")
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for k in self.kraus:
            out += k @ rho @ dagger(k)
        return hermitianize(out)

    def choi(self) -> np.ndarray:
        """Apply (id (x) channel) to the unnormalized cup state sum |jj><kk|."""
        side = self.dim_in * self.dim_out
        out = np.zeros((side, side), dtype=complex)
        for k in self.kraus:
            v = k.T.reshape(-1)
            out += np.outer(v, v.conj())
        return out

    def cptp_report(self, tol: float = 1e-8) -> "CptpReport":
        """Trace-preservation defect and minimum Choi eigenvalue."""
        acc = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for k in self.kraus:
            acc += dagger(k) @ k
        defect = max_abs(acc - np.eye(self.dim_in))
        min_eig = float(np.linalg.eigvalsh(hermitianize(self.choi()))[0])
        return CptpReport(
            trace_defect=defect,
            choi_min_eigenvalue=min_eig,
            tol=tol,
            passed=bool(defect <= tol and min_eig >= -tol),
        )


@dataclass(frozen=True)
class CptpReport:
    trace_defect: float
    choi_min_eigenvalue: float
    tol: float
    passed: bool


def lift_operator(u: np.ndarray) -> QuantumChannel:
    """Channel with the single Kraus operator ``u`` (rho -> u rho u^dag)."""
    u = as_complex_matrix(u, "operator")
    return QuantumChannel(dim_in=u.shape[1], dim_out=u.shape[0], kraus=(u,))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Positive semidefinite unit-diagonal matrix defining a dephasing channel."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, "correlation matrix")
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"correlation matrix shape {m.shape} does not match dim {self.dim}")
        defect = hermitian_defect(m)
        if defect > 1e-10:
            raise ValueError(f"correlation matrix is not Hermitian: max asymmetry {defect:.3e}")
        diag_err = max_abs(np.diagonal(m) - 1.0)
        if diag_err > 1e-10:
            raise ValueError(
                f"correlation matrix must have unit diagonal: max |B_jj - 1| = {diag_err:.3e}"
            )
        min_eig = float(np.linalg.eigvalsh(hermitianize(m))[0])
        if min_eig < -1e-8:
            raise ValueError(
                f"correlation matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}"
            )
        object.__setattr__(self, "matrix", _frozen(m))


def qubit_dephasing_B(gamma: float, phi: float) -> CorrelationMatrix:
    """Qubit correlation matrix [[1, e^{-g-ip}], [e^{-g+ip}, 1]].

    gamma >= 0 sets the coherence damping e^{-gamma}; phi the rotation.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    off = np.exp(-gamma - 1j * phi)
    return CorrelationMatrix(dim=2, matrix=np.array([[1.0, off], [off.conjugate(), 1.0]]))


def qubit_dephasing_B_derivative(gamma: float, phi: float) -> np.ndarray:
    """Entrywise d/dphi of the qubit correlation matrix."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    off = -1j * np.exp(-gamma - 1j * phi)
    return np.array([[0.0, off], [off.conjugate(), 0.0]], dtype=complex)


def phase_flip_probability(gamma: float) -> float:
    """p = (1 - e^{-gamma}) / 2, in [0, 1/2)."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return (1.0 - float(np.exp(-gamma))) / 2.0


def qubit_phase_flip_channel(gamma: float, phi: float) -> QuantumChannel:
    """The qubit dephasing channel as a phase-flip mixture.

    With p = (1 - e^{-gamma})/2 and U = diag(e^{i phi/2}, e^{-i phi/2}),
    the Kraus set {sqrt(1-p) U, sqrt(p) U Z} realizes
    rho -> U ((1-p) rho + p Z rho Z) U^dag, the same channel the
    correlation matrix of ``qubit_dephasing_B`` defines.
    """
    p = phase_flip_probability(gamma)
    u = np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
    z = np.diag([1.0, -1.0])
    return QuantumChannel(
        dim_in=2, dim_out=2, kraus=(np.sqrt(1.0 - p) * u, np.sqrt(p) * (u @ z))
    )


def pure_phase_B(phases: Sequence[float]) -> CorrelationMatrix:
    """Rank-one correlation matrix B_jk = e^{-i (phi_j - phi_k)}.

    The resulting channel is the unitary conjugation by
    diag(e^{i phi_j}).
    """
    ph = np.asarray(phases, dtype=float)
    if ph.ndim != 1 or ph.size == 0:
        raise ValueError(f"phases must be a non-empty 1-d sequence, got shape {ph.shape}")
    m = np.exp(-1j * (ph[:, None] - ph[None, :]))
    return CorrelationMatrix(dim=ph.size, matrix=m)


@dataclass(frozen=True)
class DephasingFamilySpec:
    """Phases and dephasing weights for the roots-of-unity family."""

    dim: int
    phases: tuple
    weights: tuple

    def __post_init__(self):
        phases = tuple(float(p) for p in self.phases)
        weights = tuple(float(w) for w in self.weights)
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if len(phases) != self.dim or len(weights) != self.dim:
            raise ValueError(
                f"need {self.dim} phases and weights, got {len(phases)} and {len(weights)}"
            )
        if any(w < 0 for w in weights):
            raise ValueError(f"weights must be nonnegative, got {weights}")
        total = sum(weights)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "weights", weights)


def dephasing_family_vectors(spec: DephasingFamilySpec) -> np.ndarray:
    """Columns x_s = sqrt(r_s) sum_j e^{-i phi_j} w_j^s |j>, w_j = e^{-2 pi i j / d}.

    The columns are pairwise orthogonal with <x_s|x_t> = sqrt(r_s r_t) d
    delta_st, and sum_s |(x_s)_j|^2 = 1 for every j.
    """
    d = spec.dim
    j = np.arange(d)
    phases = np.exp(-1j * np.asarray(spec.phases))
    roots = np.exp(-2j * np.pi * np.outer(j, np.arange(d)) / d)
    return phases[:, None] * roots * np.sqrt(np.asarray(spec.weights))[None, :]


def dephasing_family_B(spec: DephasingFamilySpec) -> CorrelationMatrix:
    """Correlation matrix sum_s x_s x_s^dag of the roots-of-unity family."""
    vectors = dephasing_family_vectors(spec)
    return CorrelationMatrix(dim=spec.dim, matrix=hermitianize(vectors @ dagger(vectors)))


def schur_channel(cs: ClassicalStructure, correlation: CorrelationMatrix) -> QuantumChannel:
    """Kraus form of rho -> conj(B) o rho in the structure's basis.

    Eigenvectors of B with eigenvalue below 1e-12 of the largest are
    dropped, so rank-deficient matrices (pure phases) yield a minimal
    Kraus set.  The Kraus list is gauge dependent for degenerate
    eigenvalues; only the channel action is physical.
    """
    if correlation.dim != cs.dim:
        raise ValueError(
            f"correlation dimension {correlation.dim} does not match structure dimension {cs.dim}"
        )
    decomp = hermitian_eig(correlation.matrix)
    lam_max = float(decomp.eigenvalues[-1])
    ops = []
    for lam, vec in zip(decomp.eigenvalues, decomp.eigenvectors.T):
        if lam < _EIGENVALUE_CUTOFF * lam_max:
            continue
        coeffs = (np.sqrt(lam) * vec).conj()
        ops.append((cs.basis * coeffs) @ dagger(cs.basis))
    return QuantumChannel(dim_in=cs.dim, dim_out=cs.dim, kraus=tuple(ops))


def apply_schur(cs: ClassicalStructure, correlation: CorrelationMatrix, rho: np.ndarray) -> np.ndarray:
    """Entrywise channel action conj(B) o rho in the structure's coordinates."""
    if correlation.dim != cs.dim:
        raise ValueError(
            f"correlation dimension {correlation.dim} does not match structure dimension {cs.dim}"
        )
    rho = validate_state(rho, name="rho")
    if rho.shape != (cs.dim, cs.dim):
        raise ValueError(f"state shape {rho.shape} does not match dimension {cs.dim}")
    coords = dagger(cs.basis) @ rho @ cs.basis
    out = cs.basis @ (correlation.matrix.conj() * coords) @ dagger(cs.basis)
    return hermitianize(out)


def random_correlation_matrix(dim: int, rng: np.random.Generator) -> CorrelationMatrix:
    """Unit-diagonal-normalized complex Wishart draw: D^{-1/2} G^dag G D^{-1/2}."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    gram = dagger(g) @ g
    scale = 1.0 / np.sqrt(np.real(np.diagonal(gram)))
    return CorrelationMatrix(dim=dim, matrix=hermitianize(gram * np.outer(scale, scale)))
