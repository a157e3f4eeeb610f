"""Classical kicked-top map on the unit sphere, Lyapunov-based chaos
classification, and the quantum-classical correspondence check that pins
every rotation-sense convention in this module.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import build_floquet, evolve
from .errors import ValidationError
from .spin import GcsParams, SpinSystem, build_gcs, expectation_vector

REGULAR_LYAPUNOV = 0.01
CHAOTIC_LYAPUNOV = 0.1


def classical_step(s: np.ndarray, k: float) -> np.ndarray:
    """One kick period of the classical map.

    Kick: rotation about z by angle k*z; then the pi/2 rotation about y,
    (x, y, z) -> (z, y, -x). Both senses are fixed by matching the
    Ehrenfest evolution of coherent-state expectation values under the
    quantum Floquet operator (see correspondence_check), not by any
    printed formula.
    """
    x, y, z = s
    c, sn = np.cos(k * z), np.sin(k * z)
    xk = x * c - y * sn
    yk = x * sn + y * c
    out = np.array([z, yk, -xk])
    return out / np.linalg.norm(out)


def classical_step_batch(S: np.ndarray, k: float) -> np.ndarray:
    """Vectorized classical_step over rows of an (n, 3) array."""
    x, y, z = S[:, 0], S[:, 1], S[:, 2]
    c, sn = np.cos(k * z), np.sin(k * z)
    out = np.stack([z, x * sn + y * c, -(x * c - y * sn)], axis=1)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def lyapunov_estimate(s0: np.ndarray, k: float, steps: int = 1000) -> float:
    """Largest Lyapunov exponent per kick via two-trajectory divergence.

    Companion trajectory offset by 1e-8, renormalized back to that
    separation after every step; returns the mean log stretching factor.
    """
    if steps < 100:
        raise ValidationError(f"steps must be >= 100, got {steps}")
    return float(lyapunov_estimate_batch(np.asarray(s0)[None, :], k, steps)[0])


def lyapunov_estimate_batch(S0: np.ndarray, k: float, steps: int = 1000) -> np.ndarray:
    """lyapunov_estimate vectorized over rows of an (n, 3) array of start points."""
    if steps < 100:
        raise ValidationError(f"steps must be >= 100, got {steps}")
    d0 = 1e-8
    S = np.asarray(S0, dtype=float)
    S = S / np.linalg.norm(S, axis=1, keepdims=True)
    # deterministic offset direction transverse to most states
    offset = np.cross(S, np.array([0.12, -0.34, 0.56]))
    small = np.linalg.norm(offset, axis=1) < 1e-6
    offset[small] = np.cross(S[small], np.array([0.91, 0.2, -0.05]))
    offset /= np.linalg.norm(offset, axis=1, keepdims=True)
    T = S + d0 * offset
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    total = np.zeros(len(S))
    for _ in range(steps):
        S = classical_step_batch(S, k)
        T = classical_step_batch(T, k)
        sep = T - S
        d = np.linalg.norm(sep, axis=1)
        total += np.log(d / d0)
        T = S + sep * (d0 / d)[:, None]
    return total / steps


@dataclass(frozen=True)
class ChaosLabel:
    lyapunov: float
    label: str   # regular | chaotic | edge


def classify(s0: np.ndarray, k: float, steps: int = 1000) -> ChaosLabel:
    lam = lyapunov_estimate(s0, k, steps)
    return ChaosLabel(lyapunov=lam, label=label_from_lyapunov(lam))


def label_from_lyapunov(lam: float) -> str:
    if lam < REGULAR_LYAPUNOV:
        return "regular"
    if lam > CHAOTIC_LYAPUNOV:
        return "chaotic"
    return "edge"


def correspondence_check(sys: SpinSystem, p: GcsParams, k: float, steps: int) -> float:
    """Max distance between <J>/J of the evolved coherent state and the
    classical trajectory from the same point, over t <= steps.

    Meaningful only for large J and few steps, where the Ehrenfest picture
    holds; this single number pins the sign conventions of classical_step.
    """
    psi = build_gcs(sys, p)
    s = p.n.copy()
    worst = 0.0
    trail = {"s": s}

    def observer(t, psi_t):
        nonlocal worst
        q = expectation_vector(sys, psi_t) / sys.J
        worst = max(worst, float(np.linalg.norm(q - trail["s"])))
        trail["s"] = classical_step(trail["s"], k)

    U = build_floquet(sys, k)
    evolve(U, psi, steps, observer)
    return worst
