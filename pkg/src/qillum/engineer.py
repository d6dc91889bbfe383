"""Probe-state engineering on a two-mode squeezed vacuum.

Covers the Gaussian baseline state itself, local conditional photon
operations (addition, subtraction, catalysis via a beam splitter with an
auxiliary Fock input and photon-number detection), the nonlocal photon
addition built from a pair of such couplers fed by a shared auxiliary beam
splitter, and a brute-force network simulator used to cross-check the
closed forms.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    CutoffError,
    DensityOperator,
    FockDims,
    FockRegister,
    beam_splitter_unitary,
    partial_trace,
)


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing strength r >= 0; lam = tanh(r) weights the photon ladder."""

    r: float

    def __post_init__(self):
        if not (self.r >= 0.0 and math.isfinite(self.r)):
            raise ValueError(f"squeezing parameter must be finite and >= 0, got {self.r}")

    @property
    def lam(self) -> float:
        return math.tanh(self.r)

    @property
    def mean_signal_photons(self) -> float:
        return math.sinh(self.r) ** 2

    @classmethod
    def from_mean_photons(cls, n_signal: float) -> "SqueezeParams":
        """Parameters with sinh^2(r) equal to the given mean photon number."""
        return cls(math.asinh(math.sqrt(n_signal)))


@dataclass(frozen=True)
class NgoSpec:
    """Conditional beam-splitter operation: inject |aux_in>, detect aux_detect.

    aux_in > aux_detect adds photons, aux_in < aux_detect subtracts,
    equality is catalysis. `target_modes` selects which half of the
    two-mode probe the coupler acts on ("A", "B", or "both" with equal
    transmissivity).
    """

    aux_in: int
    aux_detect: int
    transmissivity: float
    target_modes: str = "B"

    def __post_init__(self):
        if self.aux_in < 0 or self.aux_detect < 0:
            raise ValueError("auxiliary photon numbers must be >= 0")
        if not 0.0 <= self.transmissivity <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {self.transmissivity}")
        if self.target_modes not in ("A", "B", "both"):
            raise ValueError(f"target_modes must be 'A', 'B' or 'both', got {self.target_modes!r}")

    @property
    def kind(self) -> str:
        if self.aux_in > self.aux_detect:
            return "addition"
        if self.aux_in < self.aux_detect:
            return "subtraction"
        return "catalysis"


@dataclass(frozen=True)
class ConditionalOutcome:
    """A heralded probe state with its success probability.

    `state` is normalized whenever success_probability > 0; `leakage` is the
    probability weight the construction lost above the Fock cutoff.
    """

    state: FockRegister | DensityOperator
    success_probability: float
    leakage: float


def tmss(params: SqueezeParams, n_max: int) -> FockRegister:
    """Two-mode squeezed vacuum: sqrt(1 - lam^2) sum_n lam^n |n, n>."""
    lam = params.lam
    dims = FockDims((n_max, n_max))
    amp = np.zeros(dims.total_dim, dtype=complex)
    scale = math.sqrt(1.0 - lam * lam)
    for n in range(n_max + 1):
        amp[dims.index((n, n))] = scale * lam**n
    return FockRegister(dims, amp)


def b_coefficient(n: int, n_prime: int, k: int, T: float) -> float:
    """Coefficient of |k + n - n'><k| for the conditional coupler.

    Closed form for <n'| U |n> on the auxiliary mode of a beam splitter with
    transmissivity T = cos^2(theta), where U = exp(theta (a_aux a^dag -
    a_aux^dag a)). The reflection amplitude is sqrt(1 - T); only that choice
    is unitary, which the matrix-element cross-check enforces.
    """
    if min(n, n_prime, k) < 0:
        raise ValueError("indices must be >= 0")
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {T}")
    if k + n - n_prime < 0:
        return 0.0
    sqt = math.sqrt(T)
    sqr = math.sqrt(1.0 - T)
    total = 0.0
    for i in range(n + 1):
        j = n_prime - i
        if j < 0 or j > k:
            continue
        total += (
            (-1.0) ** j
            * math.comb(n, i)
            * math.comb(k, j)
            * sqt ** (k + 2 * i - n_prime)
            * sqr ** (n + n_prime - 2 * i)
        )
    pref = math.sqrt(
        math.factorial(k + n - n_prime) * math.factorial(n_prime)
        / (math.factorial(k) * math.factorial(n))
    )
    return pref * total


def _b_matrix(n: int, n_prime: int, T: float, n_max: int, extra_rows: int) -> np.ndarray:
    """Conditional coupler as a matrix; rows extend above the cutoff so the
    probability weight pushed out of the truncated space stays countable."""
    shift = n - n_prime
    rows = n_max + 1 + extra_rows
    out = np.zeros((rows, n_max + 1))
    for k in range(n_max + 1):
        kk = k + shift
        if 0 <= kk < rows:
            out[kk, k] = b_coefficient(n, n_prime, k, T)
    return out


def apply_local_ngo(register: FockRegister, spec: NgoSpec) -> ConditionalOutcome:
    """Apply a conditional photon operation to one or both probe modes.

    The success probability is the squared norm of the conditioned state
    before renormalization. An impossible detection pattern yields an
    explicit zero-probability outcome rather than an exception.
    """
    if register.dims.n_modes != 2:
        raise ValueError("local operations act on a two-mode register")
    cut_a, cut_b = register.dims.per_mode_cutoff
    psi = register.amplitudes.reshape(cut_a + 1, cut_b + 1)
    extra = max(spec.aux_in - spec.aux_detect, 0)
    T = spec.transmissivity

    if spec.target_modes in ("A", "both"):
        psi = _b_matrix(spec.aux_in, spec.aux_detect, T, cut_a, extra) @ psi
    if spec.target_modes in ("B", "both"):
        psi = psi @ _b_matrix(spec.aux_in, spec.aux_detect, T, cut_b, extra).T

    total = float(np.vdot(psi, psi).real)
    kept = psi[: cut_a + 1, : cut_b + 1]
    success = float(np.vdot(kept, kept).real)
    leakage = max(total - success, 0.0)
    if success == 0.0:
        state = FockRegister(register.dims, np.zeros(register.dims.total_dim, dtype=complex))
        return ConditionalOutcome(state, 0.0, leakage)
    state = FockRegister(register.dims, (kept / math.sqrt(success)).ravel())
    return ConditionalOutcome(state, success, leakage)


def nlpa_success_probability(aux_photons: int, params: SqueezeParams, T: float) -> float:
    """Heralding probability of the nonlocal addition protocol."""
    lam = params.lam
    sech2 = 1.0 / math.cosh(params.r) ** 2
    denom = 1.0 - (lam * T) ** 2
    if aux_photons == 1:
        return sech2 * (1.0 - T) / denom**2
    if aux_photons == 2:
        return sech2 * (1.0 - T) ** 2 / denom**3
    raise ValueError(f"aux_photons must be 1 or 2, got {aux_photons}")


def _nlpa_tail(aux_photons: int, x: float, first_excluded: int) -> float:
    # Closed-form tail of the component weights; avoids the catastrophic
    # cancellation of 1 - sum when the truncated sum is within 1e-16 of 1.
    m = first_excluded
    if aux_photons == 1:
        return x**m * ((m + 1) - m * x)
    u = (m + 1) * (m + 2) * x**m * (1.0 - x) ** 2
    u += 2.0 * ((m + 2) * x ** (m + 1) - (m + 1) * x ** (m + 2))
    return 0.5 * u


def nlpa_state(
    aux_photons: int, params: SqueezeParams, T: float, n_max: int
) -> ConditionalOutcome:
    """Nonlocal photon addition acting coherently on both probe modes.

    One auxiliary photon yields sum_n sqrt(p_n) (|n+1, n> + |n, n+1>)/sqrt(2)
    with p_n = (1 - lam^2 T^2)^2 (lam T)^(2n) (n + 1); two photons yield
    sum_n sqrt(q_n) (|n, n+2> - |n+2, n>)/sqrt(2) with
    q_n = (1 - lam^2 T^2)^3 (lam T)^(2n) (n + 1)(n + 2) / 2. The success
    probability is the closed-form heralding probability, and `leakage` is
    the analytic weight of components above the cutoff.
    """
    lam = params.lam
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {T}")
    if lam * T >= 1.0:
        raise ValueError(f"lam * T must be < 1, got {lam * T}")
    x = (lam * T) ** 2
    dims = FockDims((n_max, n_max))
    amp = np.zeros(dims.total_dim, dtype=complex)

    if aux_photons == 1:
        n_top = n_max - 1
        norm2 = (1.0 - x) ** 2
        for n in range(n_top + 1):
            w = norm2 * x**n * (n + 1)
            c = math.sqrt(w / 2.0)
            amp[dims.index((n + 1, n))] += c
            amp[dims.index((n, n + 1))] += c
    elif aux_photons == 2:
        if n_max < 2:
            raise CutoffError("two-photon addition needs a cutoff of at least 2")
        n_top = n_max - 2
        norm3 = (1.0 - x) ** 3
        for n in range(n_top + 1):
            w = 0.5 * norm3 * x**n * (n + 1) * (n + 2)
            c = math.sqrt(w / 2.0)
            amp[dims.index((n, n + 2))] += c
            amp[dims.index((n + 2, n))] -= c
    else:
        raise ValueError(f"aux_photons must be 1 or 2, got {aux_photons}")

    leakage = _nlpa_tail(aux_photons, x, n_top + 1) if x > 0.0 else 0.0
    state = FockRegister(dims, amp).normalized()
    success = nlpa_success_probability(aux_photons, params, T)
    return ConditionalOutcome(state, success, leakage)


def von_neumann_entropy(rho) -> float:
    """Entropy -sum lam_i log2 lam_i in bits, with 0 log 0 = 0."""
    matrix = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    vals = np.linalg.eigvalsh(matrix)
    if vals.size and vals.min() < -1e-10:
        raise ValueError(f"operator is not positive semidefinite (min eigenvalue {vals.min():.3e})")
    vals = vals[vals > max(vals.max(), 0.0) * 1e-12]
    return float(-(vals * np.log2(vals)).sum())


def marginal_state(state: FockRegister | DensityOperator, mode: int) -> DensityOperator:
    rho = state.density() if isinstance(state, FockRegister) else state
    return partial_trace(rho, (mode,))


def entanglement_entropy(state: FockRegister | DensityOperator, mode: int = 1) -> float:
    """Entropy of one marginal of a two-mode state, in bits."""
    return von_neumann_entropy(marginal_state(state, mode))


def _apply_two_mode(psi: np.ndarray, u: np.ndarray, left: int, right: int) -> np.ndarray:
    # u is indexed with `left` as the most significant mode of the pair.
    n = psi.ndim
    perm = [left, right] + [ax for ax in range(n) if ax not in (left, right)]
    t = np.transpose(psi, perm)
    shape = t.shape
    t = (u @ t.reshape(shape[0] * shape[1], -1)).reshape(shape)
    return np.transpose(t, np.argsort(perm))


def protocol_oracle(
    aux_in: tuple[int, int],
    aux_detect: tuple[int, int],
    T: float,
    params: SqueezeParams,
    n_max: int,
    bsA_ratio: float = 0.5,
) -> ConditionalOutcome:
    """Numerically simulate the full four-mode conditioning network.

    Prepares the squeezed pair on modes (A, B) with auxiliaries |m>, |n>,
    mixes the auxiliaries on a beam splitter of transmissivity `bsA_ratio`
    (balanced by default), couples auxiliary 1 to A and auxiliary 2 to B
    with transmissivity T, then projects the auxiliaries onto the detection
    pattern. Serves as the independent cross-check for every closed-form
    conditional state; works for any (m, n, m', n') configuration.
    """
    m_in, n_in = aux_in
    m_det, n_det = aux_detect
    if min(m_in, n_in, m_det, n_det) < 0:
        raise ValueError("auxiliary photon numbers must be >= 0")
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {T}")
    if not 0.0 <= bsA_ratio <= 1.0:
        raise ValueError(f"bsA_ratio must lie in [0, 1], got {bsA_ratio}")
    if max(m_in, n_in, m_det, n_det) > n_max:
        raise CutoffError("auxiliary occupation exceeds the cutoff")

    d = n_max + 1
    pair = FockDims((n_max, n_max))
    psi = np.zeros((d, d, d, d), dtype=complex)
    psi[:, :, m_in, n_in] = tmss(params, n_max).amplitudes.reshape(d, d)

    theta_a = math.acos(math.sqrt(bsA_ratio))
    theta = math.acos(math.sqrt(T))
    psi = _apply_two_mode(psi, beam_splitter_unitary(theta_a, pair), 2, 3)
    # Auxiliary mode first: the coupler convention exp(theta (a_aux a^dag
    # - a_aux^dag a)) matches the sign structure of b_coefficient.
    arm = beam_splitter_unitary(theta, pair)
    psi = _apply_two_mode(psi, arm, 2, 0)
    psi = _apply_two_mode(psi, arm, 3, 1)

    total = float(np.vdot(psi, psi).real)
    leak = abs(1.0 - total)
    if leak > 1e-4:
        raise CutoffError(
            f"network loses {leak:.3e} probability above cutoff {n_max}; "
            f"increase n_max to roughly {n_max + max(m_in + n_in, 2) + 6}"
        )

    conditioned = psi[:, :, m_det, n_det]
    success = float(np.vdot(conditioned, conditioned).real)
    if success == 0.0:
        state = FockRegister(pair, np.zeros(pair.total_dim, dtype=complex))
        return ConditionalOutcome(state, 0.0, leak)
    state = FockRegister(pair, (conditioned / math.sqrt(success)).ravel())
    return ConditionalOutcome(state, success, leak)
