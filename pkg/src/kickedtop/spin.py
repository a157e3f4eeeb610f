"""Spin-J representation: angular momentum operators and coherent states.

Basis convention: index 0 corresponds to m = J, descending to m = -J at
index N-1, so the maximal-weight state |J, J> is the first basis vector.
All operators use hbar = 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError


def _check_half_integer(J) -> float:
    twoJ = 2 * J
    if J <= 0 or abs(twoJ - round(twoJ)) > 1e-12:
        raise ValidationError(
            f"spin quantum number must be a positive integer or half-integer, got J={J}")
    return round(twoJ) / 2.0


@dataclass(frozen=True)
class SpinSystem:
    """Immutable spin-J system holding the dense angular momentum matrices."""
    J: float
    N: int
    m: np.ndarray   # magnetic quantum numbers, J down to -J
    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray

    @property
    def casimir(self) -> float:
        return self.J * (self.J + 1)


def build_spin_system(J) -> SpinSystem:
    """Construct Jx, Jy, Jz for spin J via the ladder-operator matrix elements."""
    J = _check_half_integer(J)
    N = round(2 * J) + 1
    m = J - np.arange(N)
    # J+ |J,m> = sqrt(J(J+1) - m(m+1)) |J,m+1>; with m descending this
    # places c[i] = sqrt(J(J+1) - m[i+1](m[i+1]+1)) on the first superdiagonal.
    c = np.sqrt(J * (J + 1) - m[1:] * (m[1:] + 1))
    Jp = np.diag(c, k=1).astype(complex)
    Jm = Jp.conj().T
    Jx = (Jp + Jm) / 2
    Jy = (Jp - Jm) / 2j
    Jz = np.diag(m).astype(complex)
    return SpinSystem(J=J, N=N, m=m, Jx=Jx, Jy=Jy, Jz=Jz)


@dataclass(frozen=True)
class GcsParams:
    """Direction (theta, phi) of the spin coherent state axis n."""
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise ValidationError(f"theta must lie in [0, pi], got {self.theta}")
        if not (-np.pi <= self.phi <= np.pi):
            raise ValidationError(f"phi must lie in [-pi, pi], got {self.phi}")

    @property
    def n(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi),
                         np.cos(self.theta)])


def build_gcs(sys: SpinSystem, p: GcsParams) -> np.ndarray:
    """Spin coherent state along n(theta, phi): eigenvector of n.J with eigenvalue J.

    Amplitudes are assembled in log space so binomial weights stay finite
    at large J (C(1000, 500) overflows a double).
    """
    J, m = sys.J, sys.m
    jp = J + m   # exponent of cos(theta/2)
    jm = J - m   # exponent of sin(theta/2)
    half = 0.5 * p.theta
    with np.errstate(divide="ignore", invalid="ignore"):
        log_c, log_s = np.log(np.cos(half)), np.log(np.sin(half))
        log_bin = 0.5 * (gammaln(2 * J + 1) - gammaln(jp + 1) - gammaln(jm + 1))
        # 0 * log(0) terms are a legitimate 0, not nan
        term_c = np.where(jp > 0, jp * log_c, 0.0)
        term_s = np.where(jm > 0, jm * log_s, 0.0)
    log_mag = log_bin + term_c + term_s
    amps = np.exp(log_mag) * np.exp(1j * jm * p.phi)
    return amps / np.linalg.norm(amps)


def expectation(sys: SpinSystem, A: np.ndarray, psi: np.ndarray) -> float:
    """<psi|A|psi> for Hermitian A; the tiny imaginary residue is checked then dropped."""
    if A.shape != (sys.N, sys.N) or psi.shape != (sys.N,):
        raise ValidationError(
            f"dimension mismatch: A {A.shape}, psi {psi.shape}, expected N={sys.N}")
    val = np.vdot(psi, A @ psi)
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-10 * scale:
        raise ValidationError(
            f"expectation has non-negligible imaginary part {val.imag}; A not Hermitian?")
    return float(val.real)


def expectation_vector(sys: SpinSystem, psi: np.ndarray) -> np.ndarray:
    """(<Jx>, <Jy>, <Jz>) as a real 3-vector."""
    return np.array([expectation(sys, A, psi) for A in (sys.Jx, sys.Jy, sys.Jz)])
