"""Orthonormal bases packaged as copy isometries.

A basis choice on C^d is carried by the unitary whose columns are the
basis vectors b_j, together with

    copy = sum_j (b_j (x) b_j) b_j^dag        (d^2 x d isometry)
    unit = sum_j b_j                          (unnormalized)

``copy`` duplicates basis states, ``unit`` is its unique unit.  The five
defining identities (associativity, isometry, commutativity, the
Frobenius law, and the counit law) are verified numerically in concrete
coordinates, never symbolically.

Operators diagonal in the basis are in bijection with d-vectors:
``diagonal_from_state`` sends a vector a to sum_j <a|b_j> b_j b_j^dag,
and ``state_from_diagonal`` inverts it for any operator that commutes
with ``copy``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    as_complex_matrix,
    dagger,
    hermitian_defect,
    kron,
    max_abs,
    require_finite,
)

__all__ = [
    "AxiomReport",
    "ClassicalStructure",
    "commutation_defect",
    "computational_structure",
    "diagonal_from_state",
    "make_classical_structure",
    "nfold_copy",
    "state_from_diagonal",
    "verify_axioms",
]


def _frozen_array(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ClassicalStructure:
    """A basis with its copy isometry and unnormalized unit state.

    Arrays are read-only.  ``basis`` is d x d unitary, ``copy`` is
    d^2 x d, ``unit`` is the length-d vector sum_j b_j (norm sqrt(d)).
    """

    dim: int
    basis: np.ndarray
    copy: np.ndarray
    unit: np.ndarray


def make_classical_structure(basis: np.ndarray, tol: float = 1e-10) -> ClassicalStructure:
    """Build the copy isometry and unit for a unitary basis matrix."""
    basis = as_complex_matrix(basis, "basis")
    d = basis.shape[0]
    if basis.shape != (d, d):
        raise ValueError(f"basis must be square, got shape {basis.shape}")
    defect = max_abs(dagger(basis) @ basis - np.eye(d))
    if defect > tol:
        raise ValueError(f"basis is not unitary: defect {defect:.3e} > tol {tol:.3e}")
    copy = np.zeros((d * d, d), dtype=complex)
    for j in range(d):
        bj = basis[:, j]
        copy += np.outer(np.kron(bj, bj), bj.conj())
    unit = basis.sum(axis=1)
    return ClassicalStructure(
        dim=d,
        basis=_frozen_array(basis),
        copy=_frozen_array(copy),
        unit=_frozen_array(unit),
    )


def computational_structure(dim: int) -> ClassicalStructure:
    """Classical structure of the standard basis on C^dim."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return make_classical_structure(np.eye(dim, dtype=complex))


def nfold_copy(cs: ClassicalStructure, n: int) -> np.ndarray:
    """The d^n x d isometry sum_j b_j^(x n) b_j^dag.

    Built as the left fold of the two-output copy map; associativity
    makes every fold order agree, and the fold applies the copy to the
    first tensor factor at each step without materializing Kronecker
    blow-ups.  n = 1 gives the identity.
    """
    if n < 1:
        raise ValueError(f"number of copies must be >= 1, got {n}")
    d = cs.dim
    out = np.eye(d, dtype=complex)
    for k in range(1, n):
        # out: d^k x d viewed as (d, d^{k-1}, d); copy acts on the first factor
        out = np.einsum("pk,kmc->pmc", cs.copy, out.reshape(d, d ** (k - 1), d)).reshape(
            d ** (k + 1), d
        )
    return out


def _swap(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


@dataclass(frozen=True)
class AxiomReport:
    """Max-entry deviation for each defining identity."""

    associativity_err: float
    isometry_err: float
    commutativity_err: float
    frobenius_err: float
    counit_err: float

    @property
    def max_error(self) -> float:
        return max(
            self.associativity_err,
            self.isometry_err,
            self.commutativity_err,
            self.frobenius_err,
            self.counit_err,
        )


def verify_axioms(cs: ClassicalStructure) -> AxiomReport:
    """Evaluate the five defining identities as explicit matrix equations."""
    d = cs.dim
    delta = cs.copy
    eye = np.eye(d, dtype=complex)

    assoc = max_abs(kron(delta, eye) @ delta - kron(eye, delta) @ delta)
    isom = max_abs(dagger(delta) @ delta - eye)
    comm = max_abs(_swap(d) @ delta - delta)

    pair = delta @ dagger(delta)
    frob = max(
        max_abs(kron(eye, dagger(delta)) @ kron(delta, eye) - pair),
        max_abs(kron(dagger(delta), eye) @ kron(eye, delta) - pair),
    )

    unit_bra = cs.unit.conj()[None, :]
    counit = max(
        max_abs(kron(unit_bra, eye) @ delta - eye),
        max_abs(kron(eye, unit_bra) @ delta - eye),
    )
    return AxiomReport(
        associativity_err=assoc,
        isometry_err=isom,
        commutativity_err=comm,
        frobenius_err=frob,
        counit_err=counit,
    )


def _as_vector(a, dim: int, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 2 and arr.shape == (dim, 1):
        arr = arr[:, 0]
    if arr.shape != (dim,):
        raise ValueError(f"{name} must be a vector of length {dim}, got shape {arr.shape}")
    require_finite(arr, name)
    return arr


def diagonal_from_state(cs: ClassicalStructure, a) -> np.ndarray:
    """Operator sum_j <a|b_j> b_j b_j^dag attached to the vector ``a``.

    The result is normal, diagonal in the structure's basis, and commutes
    with the copy isometry.
    """
    a = _as_vector(a, cs.dim, "state vector")
    coeffs = a.conj() @ cs.basis
    return (cs.basis * coeffs) @ dagger(cs.basis)


def commutation_defect(cs: ClassicalStructure, f: np.ndarray) -> float:
    """Max entry of copy . f - (f (x) 1) . copy."""
    f = as_complex_matrix(f, "operator")
    d = cs.dim
    if f.shape != (d, d):
        raise ValueError(f"operator shape {f.shape} does not match dimension {d}")
    return max_abs(cs.copy @ f - kron(f, np.eye(d, dtype=complex)) @ cs.copy)


def state_from_diagonal(cs: ClassicalStructure, f: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Vector a with diagonal_from_state(cs, a) == f.

    ``f`` must commute with the copy isometry within ``tol``; the inverse
    reads off conj(<b_j|f|b_j>) componentwise.
    """
    f = as_complex_matrix(f, "operator")
    defect = commutation_defect(cs, f)
    if defect > tol:
        raise ValueError(
            f"operator does not commute with the copy isometry: defect {defect:.3e} > tol {tol:.3e}"
        )
    diag = np.diagonal(dagger(cs.basis) @ f @ cs.basis)
    return cs.basis @ diag.conj()
