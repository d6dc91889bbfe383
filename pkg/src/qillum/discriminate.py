"""Distinguishability of the two hypothesis states.

Single-copy Helstrom error, the Chernoff-type overlap
Q = min_s Tr(rho0^s rho1^(1-s)), multi-copy error curves (1/2) Q^K kept in
log space, success-probability-weighted error exponents, and gain ratios
against the Gaussian baseline.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fock import DensityOperator, NumericalIntegrityError, clamped_eigh, trace_norm

S_GRID_POINTS = 101
S_TOL = 1e-6
DEFAULT_COPIES = tuple(10**i for i in range(1, 8))
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class ErrorPoint(NamedTuple):
    copies: int
    p_error: float
    log10_p_error: float


@dataclass(frozen=True)
class DiscriminationReport:
    """Summary of a single hypothesis pair's distinguishability."""

    q_value: float
    s_star: float
    helstrom_single_copy: float
    exponent: float
    gain: float
    copies_curve: tuple[ErrorPoint, ...]


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def helstrom_error(rho0, rho1) -> float:
    """Minimum single-copy discrimination error (equal priors)."""
    m0, m1 = _as_matrix(rho0), _as_matrix(rho1)
    if m0.shape != m1.shape:
        raise ValueError(f"dimension mismatch: {m0.shape} vs {m1.shape}")
    return 0.5 * (1.0 - 0.5 * trace_norm(m1 - m0))


class _OverlapData:
    """Spectral data turning Tr(rho0^s rho1^(1-s)) into a cheap scalar in s."""

    def __init__(self, rho0, rho1):
        m0, m1 = _as_matrix(rho0), _as_matrix(rho1)
        if m0.shape != m1.shape:
            raise ValueError(f"dimension mismatch: {m0.shape} vs {m1.shape}")
        self.a, self.va = clamped_eigh(m0)
        self.b, self.vb = clamped_eigh(m1)
        self.m = np.abs(self.va.conj().T @ self.vb) ** 2
        # rows/columns of the overlap matrix must each sum to 1; a breach
        # means the eigenbases lost orthonormality
        dev = max(
            np.abs(self.m.sum(axis=0) - 1.0).max(),
            np.abs(self.m.sum(axis=1) - 1.0).max(),
        )
        if dev > 1e-9:
            raise NumericalIntegrityError(
                f"eigenbasis overlap deviates from doubly stochastic by {dev:.3e}"
            )

    def _powers(self, vals: np.ndarray, s: float) -> np.ndarray:
        if s == 0.0:
            return (vals > 0.0).astype(float)
        return np.where(vals > 0.0, vals, 1.0) ** s * (vals > 0.0)

    def f(self, s: float) -> float:
        return float(self._powers(self.a, s) @ self.m @ self._powers(self.b, 1.0 - s))

    def direct_trace(self, s: float) -> complex:
        """Same overlap through explicit fractional powers, imag part kept."""
        p0 = (self.va * self._powers(self.a, s)) @ self.va.conj().T
        p1 = (self.vb * self._powers(self.b, 1.0 - s)) @ self.vb.conj().T
        return complex(np.einsum("ij,ji->", p0, p1))


def chernoff_profile(rho0, rho1, num: int = S_GRID_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate f(s) = Tr(rho0^s rho1^(1-s)) on a uniform s-grid."""
    data = _OverlapData(rho0, rho1)
    s = np.linspace(0.0, 1.0, num)
    return s, np.array([data.f(si) for si in s])


def _golden_refine(f, a: float, b: float, tol: float) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def chernoff_q(rho0, rho1, s_tol: float = S_TOL) -> tuple[float, float]:
    """Minimize Tr(rho0^s rho1^(1-s)) over s in [0, 1].

    Scans a uniform grid, then golden-section refines around the grid
    minimum. A flat profile (identical states) reports s* = 0.5. The result
    is verified against an explicit fractional-power trace at s*, whose
    imaginary residue must stay below 1e-9.
    """
    data = _OverlapData(rho0, rho1)
    s_grid = np.linspace(0.0, 1.0, S_GRID_POINTS)
    f_grid = np.array([data.f(s) for s in s_grid])

    if f_grid.max() - f_grid.min() <= 1e-12:
        q, s_star = float(f_grid.min()), 0.5
    else:
        i = int(np.argmin(f_grid))
        lo = s_grid[max(i - 1, 0)]
        hi = s_grid[min(i + 1, len(s_grid) - 1)]
        s_star = _golden_refine(data.f, lo, hi, s_tol)
        q = min(data.f(s_star), float(f_grid.min()))

    check = data.direct_trace(s_star)
    if abs(check.imag) > 1e-9 or abs(check.real - data.f(s_star)) > 1e-9:
        raise NumericalIntegrityError(
            f"overlap trace check failed at s={s_star}: {check} vs {data.f(s_star)}"
        )
    return q, float(s_star)


def error_curve(q_value: float, copies) -> list[ErrorPoint]:
    """Multi-copy error bound (1/2) q^K, computed in log space.

    `p_error` underflows to 0.0 for very large K; `log10_p_error` stays
    finite there.
    """
    if not 0.0 < q_value <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q_value}")
    out = []
    log10_q = math.log10(q_value)
    for k in copies:
        log10_p = math.log10(0.5) + k * log10_q
        out.append(ErrorPoint(int(k), 10.0**log10_p if log10_p > -300 else 0.0, log10_p))
    return out


def error_exponent(q_value: float, success_probability: float = 1.0, weighted: bool = True) -> float:
    """Asymptotic decay rate of the error probability per copy.

    Weighted by the heralding probability for conditional probes; the
    Gaussian reference uses the unweighted rate.
    """
    if q_value == 0.0:
        raise ValueError("q = 0 gives an infinite exponent; states share no support")
    if not 0.0 < q_value <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q_value}")
    if not 0.0 <= success_probability <= 1.0:
        raise ValueError(f"success probability must lie in [0, 1], got {success_probability}")
    rate = -math.log(q_value)
    return success_probability * rate if weighted else rate


def gain_ratio(exponent_alpha: float, exponent_reference: float) -> float:
    """Ratio of error exponents; values above 1 beat the reference."""
    if exponent_reference <= 0.0:
        raise ValueError(f"reference exponent must be > 0, got {exponent_reference}")
    return exponent_alpha / exponent_reference


def build_report(
    rho0,
    rho1,
    success_probability: float = 1.0,
    reference_exponent: float | None = None,
    copies=DEFAULT_COPIES,
) -> DiscriminationReport:
    """Assemble the full distinguishability summary for one hypothesis pair."""
    q, s_star = chernoff_q(rho0, rho1)
    exponent = error_exponent(q, success_probability, weighted=True)
    gain = math.nan if reference_exponent is None else gain_ratio(exponent, reference_exponent)
    return DiscriminationReport(
        q_value=q,
        s_star=s_star,
        helstrom_single_copy=helstrom_error(rho0, rho1),
        exponent=exponent,
        gain=gain,
        copies_curve=tuple(error_curve(q, copies)),
    )
