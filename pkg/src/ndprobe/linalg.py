"""Dense complex matrix arithmetic for small multipartite operators.

Everything here is a pure function of plain ``numpy`` arrays (complex128,
row-major).  Dimensions stay tiny (2 to ~8), so the Hermitian eigensolver is
a cyclic Jacobi iteration: deterministic, dependency-free and exact enough
that matrix exponentials built on it are unitary to ~1e-14.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Convergence of the Jacobi sweep is declared when the off-diagonal Frobenius
# mass drops below OFF_DIAG_TOL relative to the matrix norm.
OFF_DIAG_TOL = 1e-13
MAX_SWEEPS = 100

# Relative Hermiticity tolerance accepted by hermitian_eig / unitary_exp.
HERMITIAN_TOL = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NonHermitianError(ValueError):
    """A Hermitian matrix was required but not supplied."""


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance ||a - b||_F; zero iff the operands are equal."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return frobenius_distance(m, dagger(m)) <= tol * max(1.0, frobenius_norm(m))


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply, traces multiply."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _check_bipartite(m: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    d0, d1 = int(dims[0]), int(dims[1])
    if d0 < 1 or d1 < 1:
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    if m.shape != (d0 * d1, d0 * d1):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
    return m


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one factor of a bipartite operator, keeping subsystem ``keep``."""
    m = _check_bipartite(m, dims)
    if keep not in (0, 1):
        raise DimensionError(f"keep must be 0 or 1, got {keep}")
    d0, d1 = int(dims[0]), int(dims[1])
    t = m.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def partial_transpose(m: np.ndarray, dims: tuple[int, int], side: int) -> np.ndarray:
    """Transpose one factor of a bipartite operator (Hermiticity is preserved)."""
    m = _check_bipartite(m, dims)
    if side not in (0, 1):
        raise DimensionError(f"side must be 0 or 1, got {side}")
    d0, d1 = int(dims[0]), int(dims[1])
    t = m.reshape(d0, d1, d0, d1)
    if side == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(d0 * d1, d0 * d1)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """ab - ba; anti-Hermitian (hence traceless) for Hermitian operands."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"commutator needs equal square shapes, got {a.shape}, {b.shape}")
    return a @ b - b @ a


@dataclass(frozen=True)
class EigDecomposition:
    """Spectral data of a Hermitian matrix.

    ``eigenvalues`` are real and ascending, ``eigenvectors`` holds the
    matching orthonormal columns; ``V diag(w) V^dag`` reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    # Peel the phase off a_pq so the 2x2 block is real symmetric, then apply
    # the classic symmetric Schur rotation to zero the off-diagonal entry.
    absb = abs(apq)
    phase = apq / absb
    zeta = (aqq - app) / (2.0 * absb)
    # hypot keeps sqrt(1 + zeta^2) finite for huge zeta (tiny off-diagonals)
    if zeta >= 0.0:
        t = 1.0 / (zeta + np.hypot(1.0, zeta))
    else:
        t = -1.0 / (-zeta + np.hypot(1.0, zeta))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # columns act on the (p, q) plane; conj(phase) undoes a_pq's argument
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)


def hermitian_eig(m: np.ndarray) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues are returned ascending.  Each eigenvector's phase is fixed by
    making its largest-magnitude component real and positive, so degenerate
    subspaces still come out deterministically for a given input.

    Raises
    ------
    NonHermitianError
        If ``m`` is not Hermitian within tolerance.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise NonHermitianError("hermitian_eig requires a Hermitian matrix")
    n = m.shape[0]
    a = 0.5 * (m + dagger(m))
    v = identity(n)
    scale = frobenius_norm(a)
    if scale == 0.0:
        return EigDecomposition(np.zeros(n), v)
    thresh = OFF_DIAG_TOL * scale

    def _off_norm() -> float:
        # summed directly (not norm difference) to dodge cancellation
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    for _ in range(MAX_SWEEPS):
        if _off_norm() <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) == 0.0:
                    continue
                rot = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                a[:, [p, q]] = a[:, [p, q]] @ rot
                a[[p, q], :] = dagger(rot) @ a[[p, q], :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, [p, q]] = v[:, [p, q]] @ rot
    if _off_norm() > thresh:
        raise RuntimeError(f"Jacobi sweep did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(n):
        i = int(np.argmax(np.abs(v[:, k])))
        pivot = v[i, k]
        if abs(pivot) > 0.0:
            v[:, k] *= np.conj(pivot) / abs(pivot)
            v[i, k] = v[i, k].real
    return EigDecomposition(w, v)


def unitary_exp(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, built from the eigendecomposition.

    The spectral route (never a truncated series) keeps the result unitary to
    roundoff, which the exact non-demolition checks rely on.
    """
    eig = hermitian_eig(h)
    phases = np.exp(-1j * eig.eigenvalues * float(t))
    return (eig.eigenvectors * phases) @ dagger(eig.eigenvectors)
