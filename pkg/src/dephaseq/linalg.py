"""Dense complex linear algebra shared by every other module.

Operators, states, and isometries are plain ``numpy`` arrays with
``dtype=complex``.  Everything here is a pure function; inputs are
validated for shape and finiteness, and the numerical conventions
(symmetrization before eigendecomposition, ascending eigenvalues) live
in one place.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "HermitianEigenDecomposition",
    "PsdCheck",
    "apply_kron_chain",
    "as_complex_matrix",
    "dagger",
    "haar_random_unitary",
    "hermitian_defect",
    "hermitian_eig",
    "hermitianize",
    "is_psd",
    "kron",
    "max_abs",
    "multiply",
    "partial_trace",
    "require_finite",
    "schur_product",
]


def require_finite(a: np.ndarray, name: str = "matrix") -> None:
    """Reject NaN or Inf entries (real or imaginary part)."""
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    require_finite(arr, name)
    return arr


def max_abs(a: np.ndarray) -> float:
    """Largest entry magnitude; 0 for empty arrays."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit shape check."""
    a = as_complex_matrix(a, "left factor")
    b = as_complex_matrix(b, "right factor")
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"cannot multiply shapes {a.shape} and {b.shape}: inner dimensions differ"
        )
    return a @ b


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor major."""
    a = as_complex_matrix(a, "left factor")
    b = as_complex_matrix(b, "right factor")
    return np.kron(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose.  Involutive bit-exactly."""
    return np.asarray(a).conj().T


def schur_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise (Hadamard) product of equal-shape matrices."""
    a = as_complex_matrix(a, "left factor")
    b = as_complex_matrix(b, "right factor")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch for entrywise product: {a.shape} vs {b.shape}")
    return a * b


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a^dag) / 2."""
    return (a + dagger(a)) / 2


def hermitian_defect(a: np.ndarray) -> float:
    """Largest entry of |a - a^dag|."""
    return max_abs(a - dagger(a))


@dataclass(frozen=True)
class HermitianEigenDecomposition:
    """Eigenvalues ascending, eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(a: np.ndarray, tol: float = 1e-10) -> HermitianEigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    The input must be Hermitian within ``tol`` (max entry deviation); it
    is symmetrized before calling LAPACK so round-off in constructed
    inputs cannot leak into the spectrum.
    """
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    defect = hermitian_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: max asymmetry {defect:.3e} > tol {tol:.3e}")
    w, v = np.linalg.eigh(hermitianize(a))
    return HermitianEigenDecomposition(eigenvalues=w, eigenvectors=v)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    ``m`` must be square with side ``prod(dims)``.  Kept factors stay in
    their original order.  The trace is preserved.
    """
    m = as_complex_matrix(m)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    side = int(np.prod(dims))
    if m.shape != (side, side):
        raise ValueError(f"matrix shape {m.shape} does not match factor dimensions {dims}")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} factors")

    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise ValueError(f"too many factors ({n}) for einsum labels")
    labels = list(letters[: 2 * n])
    for j in range(n):
        if j not in keep:
            labels[n + j] = labels[j]
    out = [labels[j] for j in keep] + [labels[n + j] for j in keep]
    spec = "".join(labels) + "->" + "".join(out)
    kept_side = int(np.prod([dims[j] for j in keep])) if keep else 1
    reduced = np.einsum(spec, m.reshape(dims + dims))
    return reduced.reshape(kept_side, kept_side)


@dataclass(frozen=True)
class PsdCheck:
    """Positive-semidefiniteness verdict with the witness eigenvalue."""

    passed: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.passed


def is_psd(a: np.ndarray, tol: float = 1e-8) -> PsdCheck:
    """Check positive semidefiniteness of a Hermitian matrix."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    defect = hermitian_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: max asymmetry {defect:.3e} > tol {tol:.3e}")
    min_eig = float(np.linalg.eigvalsh(hermitianize(a))[0])
    return PsdCheck(passed=min_eig >= -tol, min_eigenvalue=min_eig)


def apply_kron_chain(ops: Sequence[np.ndarray], mat: np.ndarray) -> np.ndarray:
    """Apply (ops[0] (x) ops[1] (x) ...) to ``mat`` without forming the product.

    Each op must be square; ``mat`` has prod(dims) rows and any number of
    columns.  Equivalent to ``reduce(kron, ops) @ mat`` but contracts one
    tensor mode at a time.
    """
    ops = [as_complex_matrix(op, f"factor {i}") for i, op in enumerate(ops)]
    mat = as_complex_matrix(mat, "matrix")
    dims = []
    for i, op in enumerate(ops):
        if op.shape[0] != op.shape[1]:
            raise ValueError(f"factor {i} must be square, got shape {op.shape}")
        dims.append(op.shape[0])
    side = int(np.prod(dims))
    if mat.shape[0] != side:
        raise ValueError(f"matrix has {mat.shape[0]} rows, factors imply {side}")
    cols = mat.shape[1]
    t = mat.reshape(tuple(dims) + (cols,))
    for axis, op in enumerate(ops):
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)
    return t.reshape(side, cols)


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases
