"""Receiver-level performance on the (idler, return) pair.

Two measurement observables, hypothesis-conditioned moments, and the
Gaussian-asymptotics threshold test: with K independent pairs the outcome
sum is treated as normal with mean K M_j and variance K V_j, the threshold
symmetrizes false alarms against misses, and the error probability reduces
to a complementary error function of the signal-to-noise ratio.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, hypothesis_pair, pure_loss
from .fock import DensityOperator, NumericalIntegrityError, annihilation

SCHEMES = ("dhd", "photon_diff")


@dataclass(frozen=True)
class ReceiverStats:
    """Hypothesis moments and the derived threshold-test figures."""

    m0: float
    m1: float
    v0: float
    v1: float
    snr_linear: float
    snr_db: float
    p_error: float
    threshold: float
    copies: int


def _ladder_pair(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    a = annihilation(n_max).matrix
    eye = np.eye(n_max + 1)
    return np.kron(a, eye), np.kron(eye, a)


@functools.lru_cache(maxsize=8)
def observable_dhd(n_max: int) -> np.ndarray:
    """Double-homodyne observable n_A - (a_B^dag a_A^dag + a_B a_A) + a_B a_B^dag."""
    a_i, a_r = _ladder_pair(n_max)
    obs = a_i.conj().T @ a_i - (a_r.conj().T @ a_i.conj().T + a_r @ a_i) + a_r @ a_r.conj().T
    obs.flags.writeable = False
    return obs


@functools.lru_cache(maxsize=8)
def observable_photon_diff(n_max: int) -> np.ndarray:
    """Exchange observable a_A^dag a_B + a_B^dag a_A.

    Equals the photon-number difference counted behind a balanced mixer of
    the idler and return modes.
    """
    a_i, a_r = _ladder_pair(n_max)
    obs = a_i.conj().T @ a_r + a_r.conj().T @ a_i
    obs.flags.writeable = False
    return obs


def moments(rho, obs: np.ndarray) -> tuple[float, float]:
    """Mean and variance of a Hermitian observable on a state."""
    matrix = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    if matrix.shape != obs.shape:
        raise ValueError(f"dimension mismatch: state {matrix.shape}, observable {obs.shape}")
    rho_obs = matrix @ obs
    mean_c = complex(np.trace(rho_obs))
    second_c = complex(np.einsum("ij,ji->", rho_obs, obs))
    if abs(mean_c.imag) > 1e-8 or abs(second_c.imag) > 1e-8:
        raise NumericalIntegrityError(
            f"imaginary residue in moments: {mean_c.imag:.3e}, {second_c.imag:.3e}"
        )
    mean = mean_c.real
    var = second_c.real - mean * mean
    if var < -1e-9:
        raise NumericalIntegrityError(f"variance {var:.3e} below tolerance")
    return mean, max(var, 0.0)


def snr_and_error(m0: float, m1: float, v0: float, v1: float, copies: int) -> ReceiverStats:
    """Threshold test on K-pair Gaussian statistics.

    SNR = K (M0 - M1)^2 / (2 (sqrt(V0) + sqrt(V1))^2), the threshold
    symmetrizes the two error contributions, and
    P_e = (1/2) erfc(sqrt(K) |M0 - M1| / (sqrt(2) (sqrt(V0) + sqrt(V1)))).
    The absolute difference keeps the result independent of which
    hypothesis yields the larger mean. Zero variances with distinct means
    flag perfect discrimination through an infinite SNR.
    """
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    for v in (v0, v1):
        if v < -1e-9:
            raise ValueError(f"variance {v} is negative beyond tolerance")
    v0, v1 = max(v0, 0.0), max(v1, 0.0)
    k = float(copies)
    diff = abs(m0 - m1)

    if v0 + v1 == 0.0:
        snr = math.inf if diff > 0.0 else 0.0
        return ReceiverStats(
            m0=m0, m1=m1, v0=v0, v1=v1,
            snr_linear=snr,
            snr_db=math.inf if diff > 0.0 else -math.inf,
            p_error=0.0 if diff > 0.0 else 0.5,
            threshold=k * 0.5 * (m0 + m1),
            copies=copies,
        )

    s0, s1 = math.sqrt(v0), math.sqrt(v1)
    snr = k * (m0 - m1) ** 2 / (2.0 * (s0 + s1) ** 2)
    threshold = k * (s1 * m0 + s0 * m1) / (s0 + s1)
    p_error = 0.5 * math.erfc(math.sqrt(k) * diff / (math.sqrt(2.0) * (s0 + s1)))
    return ReceiverStats(
        m0=m0, m1=m1, v0=v0, v1=v1,
        snr_linear=snr,
        snr_db=10.0 * math.log10(snr) if snr > 0.0 else -math.inf,
        p_error=p_error,
        threshold=threshold,
        copies=copies,
    )


def receiver_pipeline(probe, params: ChannelParams, scheme: str, copies: int) -> ReceiverStats:
    """Full chain: hypothesis pair, optional loss, observable moments, stats."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    rho0, rho1 = hypothesis_pair(probe, params)
    if params.eta < 1.0:
        rho1 = pure_loss(rho1, 1, params.eta)

    cut_a, cut_b = rho0.dims.per_mode_cutoff
    if cut_a != cut_b:
        raise ValueError("receiver observables expect equal cutoffs on both modes")
    obs = observable_dhd(cut_a) if scheme == "dhd" else observable_photon_diff(cut_a)
    m0, v0 = moments(rho0, obs)
    m1, v1 = moments(rho1, obs)
    return snr_and_error(m0, m1, v0, v1, copies)
