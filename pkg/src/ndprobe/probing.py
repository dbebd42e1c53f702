"""Non-demolition probing of a hidden qubit parameter.

The probed qubit carries rho_u(x) = x |+><+| + (1-x)/2 * 1 with 0 <= x < 1.
A coupling of the form H = sigma_x (x) A + 1 (x) B (Hermitian A, traceless B)
is exactly non-demolishing: the probed reduction stays rho_u(x) for all times
and all initial probe states, while the probe picks up the value of x.  This
module validates candidate couplings against that structure, evolves the
joint system exactly through the resulting block form, hosts the closed-form
XX-coupling example used throughout, and generalizes the construction to an
N-dimensional probed system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .linalg import (
    SIGMA_X,
    SIGMA_Y,
    commutator,
    dagger,
    frobenius_norm,
    identity,
    partial_trace,
    tensor_product,
    unitary_exp,
)
from .states import (
    KET_0,
    KET_MINUS,
    KET_PLUS,
    KET_PLUS_I,
    DensityMatrix,
    as_matrix,
    bloch_vector,
    measurement_sample,
    pauli_decompose,
    pauli_vector,
    projector,
    validate_density,
)

# Structural zeros are exact algebra, extraction is a strict inequality and the
# evolution cross-check carries accumulated roundoff; the tolerances are kept
# apart so validator verdicts stay stable.
STRUCTURE_TOL = 1e-12
EXTRACTION_TOL = 1e-10
EVOLUTION_CROSS_TOL = 1e-9
MIN_SIN_2GT = 1e-6

CANONICAL_PROBES = (
    projector(KET_0),
    projector(KET_PLUS),
    projector(KET_PLUS_I),
)


class StructureError(ValueError):
    """Hamiltonian lacks the sigma_x (x) A + 1 (x) B structure."""


class IllConditionedTimeError(ValueError):
    """sin(2gt) is too small for the probe readout to carry any signal."""


def probed_state(x: float) -> DensityMatrix:
    """The hidden-parameter state x |+><+| + (1-x)/2 * 1.

    Eigenvalues are (1 +- x)/2 on the |+->, |-> pair; the Bloch vector is
    (x, 0, 0).
    """
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    m = x * projector(KET_PLUS) + 0.5 * (1.0 - x) * identity(2)
    return validate_density(m, dims=(2,))


@dataclass(frozen=True)
class ValidationReport:
    """Verdicts of the structure and extraction conditions for a coupling.

    ``structure_ok`` requires every sigma_y- and sigma_z-row coefficient of
    the probed side to vanish; ``extraction_ok`` additionally requires the
    extracted A to fail to commute with the given probe state.  ``violations``
    lists each failed condition with its magnitude.  ``c0`` (the identity
    component) only shifts a global phase and is reported informationally.
    """

    structure_ok: bool
    extraction_ok: bool
    a_part: np.ndarray
    b_part: np.ndarray
    violations: list[tuple[str, float]] = field(default_factory=list)
    c0: float = 0.0
    extraction_norm: float = 0.0

    @property
    def ok(self) -> bool:
        return self.structure_ok and self.extraction_ok


def _parts_from(d) -> tuple[np.ndarray, np.ndarray]:
    a = d.r[0] * identity(2)
    b = np.zeros((2, 2), dtype=complex)
    for k, pauli in enumerate(linalg.PAULIS):
        a = a + d.T[0, k] * pauli
        b = b + d.s[k] * pauli
    return a, b


def extract_parts(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a structure-valid coupling into (A, B).

    A = r_x 1 + sum_k T_xk sigma_k acts on the probe through sigma_x of the
    probed qubit; B = sum_k s_k sigma_k is the probe-local traceless part.
    """
    return _parts_from(pauli_decompose(np.asarray(h, dtype=complex)))


def validate_hamiltonian(h: np.ndarray, rho_p) -> ValidationReport:
    """Check a 4x4 coupling against the non-demolition conditions.

    Structure: the Pauli rows r_y, r_z and T_yk, T_zk must vanish (otherwise
    some probe state disturbs the probed reduction at first order).
    Extraction: [A, rho_p] != 0, i.e. the surviving probed-side coupling must
    actually move the chosen probe state.
    """
    h = np.asarray(h, dtype=complex)
    d = pauli_decompose(h)
    rho_p_m = as_matrix(rho_p)
    if rho_p_m.shape != (2, 2):
        raise linalg.DimensionError("probe state must be a qubit density matrix")

    violations: list[tuple[str, float]] = []
    for label, value in (("r_y", d.r[1]), ("r_z", d.r[2])):
        if abs(value) > STRUCTURE_TOL:
            violations.append((label, float(abs(value))))
    for j, row in ((1, "y"), (2, "z")):
        for k, col in enumerate("xyz"):
            if abs(d.T[j, k]) > STRUCTURE_TOL:
                violations.append((f"T_{row}{col}", float(abs(d.T[j, k]))))
    structure_ok = not violations

    a, b = _parts_from(d)
    extraction_norm = frobenius_norm(commutator(a, rho_p_m))
    extraction_ok = extraction_norm > EXTRACTION_TOL
    if not extraction_ok:
        violations.append(("[A, rho_p]", float(extraction_norm)))
    return ValidationReport(
        structure_ok=structure_ok,
        extraction_ok=extraction_ok,
        a_part=a,
        b_part=b,
        violations=violations,
        c0=d.c0,
        extraction_norm=float(extraction_norm),
    )


def first_order_delta(h: np.ndarray, x: float, rho_p) -> float:
    """Leading-order disturbance ||Tr_p [H, rho_u(x) (x) rho_p]||_F.

    Vanishes for every probe state exactly when the structure conditions
    hold (or trivially when x = 0, where rho_u is maximally mixed).
    """
    h = np.asarray(h, dtype=complex)
    joint = tensor_product(probed_state(x).matrix, as_matrix(rho_p))
    return frobenius_norm(partial_trace(commutator(h, joint), (2, 2), keep=0))


def _branch_unitaries(a: np.ndarray, b: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    return unitary_exp(a + b, t), unitary_exp(-a + b, t)


def evolve_joint(x: float, h: np.ndarray, rho_p, t: float) -> DensityMatrix:
    """Exact joint state exp(-iHt) (rho_u (x) rho_p) exp(iHt).

    The state is assembled from the block form
    sum_(+-) (1 +- x)/2 |+-><+-| (x) exp(-i(+-A+B)t) rho_p exp(i(+-A+B)t),
    and cross-checked against the generic conjugation by exp(-iHt); the two
    must agree to 1e-9 or the call fails.  Structure-invalid couplings are
    refused because the block form would not describe them.
    """
    h = np.asarray(h, dtype=complex)
    rho_p_m = as_matrix(rho_p)
    report = validate_hamiltonian(h, rho_p_m)
    if not report.structure_ok:
        names = ", ".join(name for name, _ in report.violations)
        raise StructureError(f"coupling violates the structure conditions: {names}")

    u_plus, u_minus = _branch_unitaries(report.a_part, report.b_part, t)
    w_plus, w_minus = 0.5 * (1.0 + x), 0.5 * (1.0 - x)
    block = w_plus * tensor_product(
        projector(KET_PLUS), u_plus @ rho_p_m @ dagger(u_plus)
    ) + w_minus * tensor_product(projector(KET_MINUS), u_minus @ rho_p_m @ dagger(u_minus))

    u = unitary_exp(h, t)
    generic = u @ tensor_product(probed_state(x).matrix, rho_p_m) @ dagger(u)
    mismatch = linalg.frobenius_distance(block, generic)
    if mismatch > EVOLUTION_CROSS_TOL:
        raise RuntimeError(
            f"block and generic evolution disagree by {mismatch:.3e}; "
            "this indicates an internal inconsistency"
        )
    return validate_density(block, dims=(2, 2))


def xx_hamiltonian(g: float) -> np.ndarray:
    """The XX coupling g sigma_x (x) sigma_x (A = g sigma_x, B = 0)."""
    return float(g) * tensor_product(SIGMA_X, SIGMA_X)


def _xx_branch(gt: float, sign: float) -> np.ndarray:
    c, s = np.cos(gt), np.sin(gt)
    return np.array(
        [[c * c, sign * 1j * s * c], [-sign * 1j * s * c, s * s]], dtype=complex
    )


def xx_final_state(x: float, g: float, t: float) -> DensityMatrix:
    """Closed-form joint state of the XX model started from probe |0><0|.

    The two probed branches |+->, |-> drag the probe to conjugate rotated
    states, leaving a classical-quantum state whose probed reduction is
    rho_u(x) for every (g, t).
    """
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    gt = float(g) * float(t)
    m = 0.5 * (1.0 + x) * tensor_product(projector(KET_PLUS), _xx_branch(gt, +1.0)) + 0.5 * (
        1.0 - x
    ) * tensor_product(projector(KET_MINUS), _xx_branch(gt, -1.0))
    return validate_density(m, dims=(2, 2))


def xx_probe_state(x: float, g: float, t: float) -> DensityMatrix:
    """Probe-side reduction of the XX model: all the x-signal lives here.

    Entrywise [[cos^2(gt), i x sin(gt)cos(gt)], [-i x sin(gt)cos(gt),
    sin^2(gt)]]; the off-diagonal carries x through Tr(sigma_y rho) =
    -x sin(2gt).
    """
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    gt = float(g) * float(t)
    c, s = np.cos(gt), np.sin(gt)
    m = np.array([[c * c, 1j * x * s * c], [-1j * x * s * c, s * s]], dtype=complex)
    return validate_density(m, dims=(2,))


def estimate_x(rho_pf, g: float, t: float) -> float:
    """Read x off the probe state as -Tr(sigma_y rho_pf)/sin(2gt).

    Exact on the XX model's probe reduction.  Times with |sin(2gt)| <= 1e-6
    are refused: the readout has no signal there.
    """
    gt = float(g) * float(t)
    s2 = np.sin(2.0 * gt)
    if abs(s2) <= MIN_SIN_2GT:
        raise IllConditionedTimeError(
            f"sin(2gt) = {s2:.3e} vanishes at gt = {gt}; pick a time with signal"
        )
    m = as_matrix(rho_pf)
    if m.shape != (2, 2):
        raise linalg.DimensionError("estimate_x expects the probe qubit reduction")
    return float(-np.trace(SIGMA_Y @ m).real / s2)


def estimate_x_sampled(
    x_true: float, g: float, t: float, shots: int, seed: int
) -> tuple[float, float]:
    """Finite-shot front end: sample sigma_y on the probe and invert.

    Returns (estimate, standard error); the standard error propagates the
    sample standard deviation through the 1/sin(2gt) gain.
    """
    gt = float(g) * float(t)
    s2 = np.sin(2.0 * gt)
    if abs(s2) <= MIN_SIN_2GT:
        raise IllConditionedTimeError(
            f"sin(2gt) = {s2:.3e} vanishes at gt = {gt}; pick a time with signal"
        )
    rho_pf = xx_probe_state(x_true, g, t)
    summary = measurement_sample(rho_pf, SIGMA_Y, shots, seed)
    estimate = -summary.mean / s2
    if shots > 1:
        deviations = summary.values - summary.mean
        var = float((summary.counts @ deviations**2) / (shots - 1))
    else:
        var = 0.0
    std_error = np.sqrt(var / shots) / abs(s2)
    return float(estimate), float(std_error)


def discord_witness(
    a_part: np.ndarray, b_part: np.ndarray, rho_p, dt: float
) -> tuple[float, float]:
    """First-order discord production, measured two independent ways.

    With rho_1 = rho_p - i dt [B, rho_p] and X = i dt [A, rho_p], the
    commutator [rho_1, X] witnesses probe-side discord after an infinitesimal
    step.  Its Pauli-vector magnitude (Frobenius norm over sqrt 2) is
    returned alongside the vector expression dt * ||C x (A x C)||, where A is
    the sigma-vector of a_part and C the Bloch vector of rho_p.  The two
    agree to O(dt^2) and both vanish exactly when A and C are parallel.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    a_part = np.asarray(a_part, dtype=complex)
    b_part = np.asarray(b_part, dtype=complex)
    rho_p_m = as_matrix(rho_p)
    rho_1 = rho_p_m - 1j * dt * commutator(b_part, rho_p_m)
    x_op = 1j * dt * commutator(a_part, rho_p_m)
    commutator_norm = frobenius_norm(commutator(rho_1, x_op)) / np.sqrt(2.0)
    a_vec = pauli_vector(a_part)
    c_vec = bloch_vector(rho_p_m)
    cross = dt * float(np.linalg.norm(np.cross(c_vec, np.cross(a_vec, c_vec))))
    return float(commutator_norm), float(cross)


@dataclass(frozen=True)
class GeneralizedProbeSpec:
    """Probed system of dimension n with x-dependent eigenweights.

    ``eigenvectors`` holds the orthonormal eigenbasis |nu_i> as columns,
    ``probabilities`` maps x to the weight vector p(x) (nonnegative, summing
    to 1), and ``g_t`` is the (traceless) spectrum of the probed-side
    generator expressed in that eigenbasis.
    """

    n: int
    eigenvectors: np.ndarray
    probabilities: Callable[[float], np.ndarray]
    g_t: np.ndarray

    def weights(self, x: float) -> np.ndarray:
        p = np.asarray(self.probabilities(x), dtype=float)
        if p.shape != (self.n,):
            raise ValueError(f"probabilities must return {self.n} weights, got {p.shape}")
        if np.any(p < -1e-12):
            raise ValueError(f"negative probability {p.min():.3e} at x = {x}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()} at x = {x}, expected 1")
        return np.clip(p, 0.0, None)


def _check_generalized(spec: GeneralizedProbeSpec) -> None:
    v = np.asarray(spec.eigenvectors, dtype=complex)
    if v.shape != (spec.n, spec.n):
        raise linalg.DimensionError(f"eigenvector matrix must be {spec.n}x{spec.n}")
    if linalg.frobenius_distance(dagger(v) @ v, identity(spec.n)) > 1e-10:
        raise ValueError("eigenvector matrix is not unitary within 1e-10")
    g = np.asarray(spec.g_t, dtype=float)
    if g.shape != (spec.n,):
        raise ValueError(f"g_t must hold {spec.n} real values")
    if abs(g.sum()) > 1e-10:
        raise ValueError(f"generator spectrum must be traceless, sums to {g.sum()}")


def generalized_probed_state(spec: GeneralizedProbeSpec, x: float) -> DensityMatrix:
    """sum_i p_i(x) |nu_i><nu_i| on the n-dimensional probed system."""
    _check_generalized(spec)
    p = spec.weights(x)
    v = np.asarray(spec.eigenvectors, dtype=complex)
    return validate_density((v * p) @ dagger(v), dims=(spec.n,))


def build_generalized(
    spec: GeneralizedProbeSpec, a_part: np.ndarray, b_part: np.ndarray
) -> np.ndarray:
    """Coupling G (x) A + 1 (x) B for the n-dimensional probed system.

    G is diagonal with spectrum ``spec.g_t`` in the probed eigenbasis, so the
    joint evolution is block diagonal over |nu_i> and the probed reduction
    sum_i p_i(x) |nu_i><nu_i| is conserved exactly for all t.
    """
    _check_generalized(spec)
    a_part = np.asarray(a_part, dtype=complex)
    b_part = np.asarray(b_part, dtype=complex)
    for name, op in (("A", a_part), ("B", b_part)):
        if op.shape != (2, 2):
            raise linalg.DimensionError(f"{name} must be a 2x2 probe operator")
        if not linalg.is_hermitian(op):
            raise linalg.NonHermitianError(f"{name} must be Hermitian")
    if abs(np.trace(b_part)) > 1e-12:
        raise ValueError(f"B must be traceless, trace is {np.trace(b_part)}")
    v = np.asarray(spec.eigenvectors, dtype=complex)
    g_op = (v * np.asarray(spec.g_t, dtype=float)) @ dagger(v)
    return tensor_product(g_op, a_part) + tensor_product(identity(spec.n), b_part)


def evolve_generalized(
    spec: GeneralizedProbeSpec,
    x: float,
    a_part: np.ndarray,
    b_part: np.ndarray,
    rho_p,
    t: float,
) -> DensityMatrix:
    """Exact evolution of the generalized probed-plus-probe system.

    Assembled branch by branch, sum_i p_i(x) |nu_i><nu_i| (x) U_i rho_p
    U_i^dag with U_i = exp(-i (g_i A + B) t), and cross-checked against the
    generic conjugation by exp(-iHt).
    """
    h = build_generalized(spec, a_part, b_part)
    p = spec.weights(x)
    v = np.asarray(spec.eigenvectors, dtype=complex)
    rho_p_m = as_matrix(rho_p)
    a_part = np.asarray(a_part, dtype=complex)
    b_part = np.asarray(b_part, dtype=complex)
    n = spec.n
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        u_i = unitary_exp(float(spec.g_t[i]) * a_part + b_part, t)
        block += p[i] * tensor_product(projector(v[:, i]), u_i @ rho_p_m @ dagger(u_i))
    u = unitary_exp(h, t)
    joint0 = tensor_product(generalized_probed_state(spec, x).matrix, rho_p_m)
    generic = u @ joint0 @ dagger(u)
    mismatch = linalg.frobenius_distance(block, generic)
    if mismatch > EVOLUTION_CROSS_TOL:
        raise RuntimeError(
            f"generalized block and generic evolution disagree by {mismatch:.3e}"
        )
    return validate_density(block, dims=(n, 2))


def random_density(rng: np.random.Generator, n: int) -> DensityMatrix:
    """Full-rank random density matrix (normalized Ginibre product)."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ dagger(g)
    return validate_density(m / np.trace(m).real, dims=(n,))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random unitary as exp(-iH) of a random Hermitian matrix."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return unitary_exp(g + dagger(g), 1.0)


def random_valid_hamiltonian(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random coupling of the admissible form sigma_x (x) A + 1 (x) B."""
    r_x = rng.uniform(-1.0, 1.0) * scale
    t_row = rng.uniform(-1.0, 1.0, size=3) * scale
    s = rng.uniform(-1.0, 1.0, size=3) * scale
    h = r_x * tensor_product(SIGMA_X, identity(2))
    for k, pauli in enumerate(linalg.PAULIS):
        h = h + t_row[k] * tensor_product(SIGMA_X, pauli)
        h = h + s[k] * tensor_product(identity(2), pauli)
    return h


VIOLATION_SLOTS = (
    ("r_y", 1, None),
    ("r_z", 2, None),
    ("T_yx", 1, 0),
    ("T_yy", 1, 1),
    ("T_yz", 1, 2),
    ("T_zx", 2, 0),
    ("T_zy", 2, 1),
    ("T_zz", 2, 2),
)


def random_violating_hamiltonian(
    rng: np.random.Generator, min_violation: float = 0.1
) -> tuple[np.ndarray, float]:
    """Random coupling violating the structure conditions.

    Starts from an admissible coupling and injects between one and three
    forbidden Pauli components with magnitudes in [min_violation, 1].
    Returns the matrix and the largest injected magnitude.
    """
    h = random_valid_hamiltonian(rng)
    n_slots = int(rng.integers(1, 4))
    picks = rng.choice(len(VIOLATION_SLOTS), size=n_slots, replace=False)
    worst = 0.0
    for pick in picks:
        _, j, k = VIOLATION_SLOTS[pick]
        magnitude = rng.uniform(min_violation, 1.0) * rng.choice((-1.0, 1.0))
        worst = max(worst, abs(magnitude))
        pj = linalg.PAULIS[j]
        if k is None:
            h = h + magnitude * tensor_product(pj, identity(2))
        else:
            h = h + magnitude * tensor_product(pj, linalg.PAULIS[k])
    return h, worst
