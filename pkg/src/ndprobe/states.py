"""Density-matrix semantics on top of the raw matrix layer.

Covers validation, the two-qubit Pauli-product decomposition, Bloch vectors,
von Neumann entropy (base 2 throughout, so everything is in bits) and
finite-shot projective sampling with a seeded PCG64 stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import PAULIS, dagger, hermitian_eig, identity

DENSITY_TOL = 1e-10

KET_0 = np.array([1.0, 0.0], dtype=complex)
KET_1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
KET_PLUS_I = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)


class InvalidDensityError(ValueError):
    """Matrix fails the Hermitian / unit-trace / positivity contract."""


def projector(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| for a state vector (not required to be normalized)."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """A checked density operator plus its subsystem dimensions.

    Instances come out of :func:`validate_density`; the stored array is
    marked read-only so shared references stay safe.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def validate_density(m: np.ndarray, dims: tuple[int, ...] | None = None) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; return a DensityMatrix.

    Eigenvalues in [-1e-10, 0) are clamped to zero and sub-tolerance trace
    drift is renormalized away; anything beyond tolerance raises
    :class:`InvalidDensityError`.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDensityError(f"density matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    if dims is None:
        dims = (n,)
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != n:
        raise InvalidDensityError(f"dims {dims} do not multiply to dimension {n}")
    if not linalg.is_hermitian(m, tol=DENSITY_TOL):
        raise InvalidDensityError("density matrix is not Hermitian within 1e-10")
    h = 0.5 * (m + dagger(m))
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > DENSITY_TOL:
        raise InvalidDensityError(f"trace is {tr}, not 1 within 1e-10")
    eig = hermitian_eig(h)
    w = eig.eigenvalues
    if w[0] < -DENSITY_TOL:
        raise InvalidDensityError(f"negative eigenvalue {w[0]:.3e} below -1e-10")
    if w[0] < 0.0:
        w = np.clip(w, 0.0, None)
        h = (eig.eigenvectors * w) @ dagger(eig.eigenvectors)
        tr = float(np.trace(h).real)
    h = h / tr
    h.flags.writeable = False
    return DensityMatrix(matrix=h, dims=dims)


def as_matrix(rho) -> np.ndarray:
    """Accept a DensityMatrix or a bare array and hand back the array."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


@dataclass(frozen=True)
class PauliDecomposition:
    """Coefficients of a two-qubit Hermitian operator on the Pauli basis.

    M = c0 (1 x 1) + sum_j r_j (sigma_j x 1) + sum_k s_k (1 x sigma_k)
        + sum_jk T_jk (sigma_j x sigma_k)

    Coefficients use the Tr(M . basis)/4 convention and are all real for a
    Hermitian source.
    """

    c0: float
    r: np.ndarray
    s: np.ndarray
    T: np.ndarray


# the 16 products (1, sx, sy, sz) x (1, sx, sy, sz), index 4*j + k
_PRODUCT_BASIS = np.stack(
    [np.kron(a, b) for a in (identity(2), *PAULIS) for b in (identity(2), *PAULIS)]
)


def pauli_decompose(m: np.ndarray) -> PauliDecomposition:
    """Project a 4x4 Hermitian operator onto the two-qubit Pauli basis."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise linalg.DimensionError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not linalg.is_hermitian(m):
        raise linalg.NonHermitianError("pauli_decompose requires a Hermitian matrix")
    coeffs = np.einsum("ij,kji->k", m, _PRODUCT_BASIS).real / 4.0
    grid = coeffs.reshape(4, 4)
    return PauliDecomposition(
        c0=float(grid[0, 0]), r=grid[1:, 0].copy(), s=grid[0, 1:].copy(), T=grid[1:, 1:].copy()
    )


def pauli_recompose(d: PauliDecomposition) -> np.ndarray:
    """Rebuild the 4x4 operator from its Pauli coefficients."""
    grid = np.empty((4, 4))
    grid[0, 0] = d.c0
    grid[1:, 0] = d.r
    grid[0, 1:] = d.s
    grid[1:, 1:] = d.T
    return np.einsum("k,kij->ij", grid.reshape(16), _PRODUCT_BASIS)


def bloch_vector(rho) -> np.ndarray:
    """Bloch vector p with rho = (1 + p . sigma)/2 for a single qubit."""
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise linalg.DimensionError(f"bloch_vector needs a 2x2 state, got {m.shape}")
    return np.array([np.trace(m @ p).real for p in PAULIS])


def pauli_vector(m: np.ndarray) -> np.ndarray:
    """Sigma coefficients Tr(m sigma_k)/2 of a 2x2 Hermitian operator."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise linalg.DimensionError(f"pauli_vector needs a 2x2 operator, got {m.shape}")
    return np.array([np.trace(m @ p).real for p in PAULIS]) / 2.0


def entropy_bits(spectrum: np.ndarray) -> float:
    """Shannon entropy (bits) of a probability vector, with 0 log 0 = 0."""
    p = np.asarray(spectrum, dtype=float)
    if np.any(p < -DENSITY_TOL):
        raise InvalidDensityError(f"negative probability {p.min():.3e} in spectrum")
    p = np.clip(p, 0.0, None)
    p = p[p > 0.0]
    if p.size == 0:
        return 0.0
    return float(-(p @ np.log2(p))) + 0.0


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr rho log2 rho, in bits."""
    m = as_matrix(rho)
    return entropy_bits(hermitian_eig(m).eigenvalues)


@dataclass(frozen=True)
class MeasurementSummary:
    """Finite-shot record: distinct outcome values, counts and sample mean."""

    values: np.ndarray
    counts: np.ndarray
    mean: float

    @property
    def shots(self) -> int:
        return int(self.counts.sum())


def _group_spectrum(eig: linalg.EigDecomposition, rho: np.ndarray):
    """Merge (near-)degenerate eigenvalues into outcomes with projector weights."""
    w = eig.eigenvalues
    v = eig.eigenvectors
    weights = np.einsum("ik,ij,jk->k", v.conj(), rho, v).real
    gap_tol = 1e-8 * max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    values, probs = [], []
    start = 0
    for k in range(1, w.size + 1):
        if k == w.size or w[k] - w[start] > gap_tol:
            values.append(float(np.mean(w[start:k])))
            probs.append(float(np.sum(weights[start:k])))
            start = k
    return np.array(values), np.array(probs)


def measurement_sample(rho, observable: np.ndarray, shots: int, seed: int) -> MeasurementSummary:
    """Sample projective measurements of ``observable`` on ``rho``.

    Outcome probabilities are the Born weights Tr(P_i rho) of the observable's
    eigenprojectors.  Draws come from a PCG64 stream seeded with ``seed`` and
    are mapped through the inverse CDF, so results are bit-reproducible.

    Parameters
    ----------
    rho : DensityMatrix or array
        State to measure.
    observable : array
        Hermitian operator of the same dimension.
    shots : int
        Number of samples, at least 1.
    seed : int
        PCG64 seed.
    """
    m = as_matrix(rho)
    observable = np.asarray(observable, dtype=complex)
    if observable.shape != m.shape:
        raise linalg.DimensionError(
            f"observable shape {observable.shape} does not match state {m.shape}"
        )
    if shots < 1:
        raise ValueError("shots must be at least 1")
    values, probs = _group_spectrum(hermitian_eig(observable), m)
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise InvalidDensityError(f"Born weights sum to {total}, state is not normalized")
    probs = probs / total
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(int(shots))
    idx = np.searchsorted(np.cumsum(probs), u, side="right")
    idx = np.minimum(idx, values.size - 1)
    counts = np.bincount(idx, minlength=values.size)
    mean = float(counts @ values / shots)
    return MeasurementSummary(values=values, counts=counts, mean=mean)
