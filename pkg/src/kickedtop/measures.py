"""Generalized-entanglement purities, extents, RMT baseline, Haar sampling,
and the small-J Meyer-Wallach cross-check.

GE relative to an observable algebra is 1 minus the normalized sum of
squared expectation values of its orthogonal Hermitian basis; for the full
angular momentum algebra that sum runs over Jx, Jy, Jz with normalization
1/J^2, and for the single-axis subalgebra over Jz alone.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import NumericalInvariantError, ValidationError
from .spin import SpinSystem, expectation, expectation_vector

IDENTITY_RESIDUAL_TOL = 1e-10
VARIANCE_CLAMP = 1e-12


def purity_su2(sys: SpinSystem, psi: np.ndarray) -> float:
    """(<Jx>^2 + <Jy>^2 + <Jz>^2) / J^2, equal to 1 exactly on coherent states."""
    v = expectation_vector(sys, psi)
    return float(v @ v) / sys.J ** 2


def purity_so2(sys: SpinSystem, psi: np.ndarray) -> float:
    """<Jz>^2 / J^2."""
    return expectation(sys, sys.Jz, psi) ** 2 / sys.J ** 2


def extent(sys: SpinSystem, A: np.ndarray, psi: np.ndarray) -> float:
    """sqrt(<A^2> - <A>^2); roundoff-negative variances below 1e-12 clamp to 0."""
    if A.shape != (sys.N, sys.N) or psi.shape != (sys.N,):
        raise ValidationError(
            f"dimension mismatch: A {A.shape}, psi {psi.shape}, expected N={sys.N}")
    Apsi = A @ psi
    mean = np.vdot(psi, Apsi).real
    var = np.vdot(Apsi, Apsi).real - mean ** 2
    if var < -VARIANCE_CLAMP * max(1.0, mean ** 2):
        raise NumericalInvariantError(
            f"variance {var} is negative beyond the roundoff clamp")
    return float(np.sqrt(max(var, 0.0)))


def invariant_uncertainty(sys: SpinSystem, psi: np.ndarray) -> float:
    """Total variance over Jx, Jy, Jz; equals J(J+1) minus the unnormalized
    purity sum for any pure state."""
    return float(sum(extent(sys, A, psi) ** 2 for A in (sys.Jx, sys.Jy, sys.Jz)))


def ge_extent_identity_residual(sys: SpinSystem, psi: np.ndarray) -> float:
    """|GE_su2 - (sum of squared rescaled extents - 1/J)|; identically ~0."""
    ge = 1.0 - purity_su2(sys, psi)
    ext_sum = sum(extent(sys, A, psi) ** 2 for A in (sys.Jx, sys.Jy, sys.Jz))
    return abs(ge - (ext_sum / sys.J ** 2 - 1.0 / sys.J))


def rmt_average_ge(J: float) -> float:
    """Haar-average GE for spin J: 1 - 1/(2J)."""
    if J <= 0:
        raise ValidationError(f"J must be positive, got {J}")
    return 1.0 - 1.0 / (2.0 * J)


def haar_random_state(N: int, seed) -> np.ndarray:
    """Haar-uniform pure state: normalized vector of iid complex Gaussians."""
    if N < 1:
        raise ValidationError(f"dimension must be >= 1, got {N}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return z / np.linalg.norm(z)


@dataclass(frozen=True)
class RmtBaseline:
    J: float
    mean_ge: float
    sample_mean: float
    sample_stderr: float


def haar_baseline(sys: SpinSystem, samples: int, seed) -> RmtBaseline:
    """Monte Carlo estimate of the Haar-average GE against the 1 - 1/2J prediction."""
    rng = np.random.default_rng(seed)
    ges = np.array([1.0 - purity_su2(sys, haar_random_state(sys.N, rng))
                    for _ in range(samples)])
    return RmtBaseline(J=sys.J, mean_ge=rmt_average_ge(sys.J),
                       sample_mean=float(ges.mean()),
                       sample_stderr=float(ges.std(ddof=1) / np.sqrt(samples)))


@dataclass(frozen=True)
class GeRecord:
    """Per-state snapshot of every entanglement-related scalar we track."""
    p_su2: float
    ge_su2: float
    p_so2: float
    ge_so2: float
    ext_x: float
    ext_y: float
    ext_z: float
    inv_uncertainty: float


def ge_record(sys: SpinSystem, psi: np.ndarray) -> GeRecord:
    """Compute all measures in one pass and enforce the GE-extent identity."""
    exts = [extent(sys, A, psi) for A in (sys.Jx, sys.Jy, sys.Jz)]
    p2 = purity_su2(sys, psi)
    p_so2 = purity_so2(sys, psi)
    ext_sum = sum(e ** 2 for e in exts)
    residual = abs((1.0 - p2) - (ext_sum / sys.J ** 2 - 1.0 / sys.J))
    if residual > IDENTITY_RESIDUAL_TOL:
        raise NumericalInvariantError(
            f"GE-extent identity residual {residual:.3e} exceeds {IDENTITY_RESIDUAL_TOL}")
    return GeRecord(p_su2=p2, ge_su2=1.0 - p2, p_so2=p_so2, ge_so2=1.0 - p_so2,
                    ext_x=exts[0], ext_y=exts[1], ext_z=exts[2],
                    inv_uncertainty=ext_sum)


def _embed_symmetric_qubits(sys: SpinSystem, psi: np.ndarray) -> np.ndarray:
    """Embed a spin-J state into the symmetric sector of 2J qubits.

    |J, m> maps to the Dicke state with J - m qubits flipped to |1>,
    i.e. the normalized symmetric superposition of all C(2J, J - m)
    such bitstrings.
    """
    n = round(2 * sys.J)
    big = np.zeros(2 ** n, dtype=complex)
    for i, amp in enumerate(psi):
        flips = round(sys.J - sys.m[i])   # number of 1-bits
        weight = amp / np.sqrt(comb(n, flips))
        for ones in combinations(range(n), flips):
            idx = sum(1 << b for b in ones)
            big[idx] += weight
    return big


def meyer_wallach_crosscheck(sys: SpinSystem, psi: np.ndarray) -> float:
    """|GE_su2 - Meyer-Wallach measure of the 2J-qubit embedding|.

    Brute-force oracle: embeds into the full 2^(2J) space, partial-traces
    each qubit, and averages the linear entropies. The rescaling constant 2
    makes the measure coincide with GE_su2 (pinned at J = 1/2 and J = 1).
    """
    n = round(2 * sys.J)
    if n > 10:
        raise ValidationError(f"2J = {n} > 10: embedding cost is exponential")
    big = _embed_symmetric_qubits(sys, psi)
    lin_entropies = []
    for q in range(n):
        # reshape so qubit q is its own axis, flatten the rest
        t = big.reshape([2] * n)
        t = np.moveaxis(t, q, 0).reshape(2, -1)
        rho = t @ t.conj().T
        lin_entropies.append(1.0 - np.trace(rho @ rho).real)
    mw = 2.0 * float(np.mean(lin_entropies))
    return abs((1.0 - purity_su2(sys, psi)) - mw)
