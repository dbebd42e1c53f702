"""Hand-built closed forms used as test oracles.

These are written out independently of the package (plain numpy, no calls
into ndprobe) so that agreement checks are genuinely dual-route.
"""

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)

BELL_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def outer(psi):
    return np.outer(psi, psi.conj())


def hidden_state(x):
    """x |+><+| + (1 - x)/2 * identity, written out entrywise."""
    return np.array([[0.5, 0.5 * x], [0.5 * x, 0.5]], dtype=complex)


def branch_state(gt, sign):
    """Probe branch [[cos^2, +-i sc], [-+i sc, sin^2]] of the XX model."""
    c, s = np.cos(gt), np.sin(gt)
    return np.array(
        [[c * c, sign * 1j * s * c], [-sign * 1j * s * c, s * s]], dtype=complex
    )


def joint_state(x, gt):
    """Closed-form XX-model joint state (probed tensor probe)."""
    return 0.5 * (1.0 + x) * np.kron(outer(KET_PLUS), branch_state(gt, +1.0)) + 0.5 * (
        1.0 - x
    ) * np.kron(outer(KET_MINUS), branch_state(gt, -1.0))


def probe_reduction(x, gt):
    """Closed-form probe-side reduction of the XX model."""
    c, s = np.cos(gt), np.sin(gt)
    return np.array(
        [[c * c, 1j * x * s * c], [-1j * x * s * c, s * s]], dtype=complex
    )


def binary_entropy(p):
    out = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            out -= q * np.log2(q)
    return out


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return g + g.conj().T


def random_density_matrix(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ g.conj().T
    return m / np.trace(m).real
