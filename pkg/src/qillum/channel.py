"""Target channels for the two-hypothesis detection problem.

Target absent: the retained idler next to a bare thermal return. Target
present: the probe's signal mode passes a weakly reflecting beam splitter
immersed in thermal noise, realized here as a Kraus map on the signal mode
so that production runs never need the three-mode dilation (which remains
the small-cutoff oracle). A pure-loss channel models post-reflection
attenuation of the return.
"""

import functools
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
    tensor,
    thermal_state,
    thermal_weights,
)

# Environment weights below this bound contribute less than test tolerance
# to completeness and are dropped.
WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True)
class ChannelParams:
    """Target reflectivity kappa, background occupation n_th, and loss eta.

    The environment injected behind the target carries n_th / (1 - kappa)
    photons so the return background is exactly n_th. `eta` is the
    transmissivity of the optional post-reflection loss (1 = lossless).
    """

    kappa: float
    n_th: float
    eta: float = 1.0
    env_cutoff: int = 24

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError(f"kappa must lie in (0, 1], got {self.kappa}")
        if self.n_th < 0.0:
            raise ValueError(f"n_th must be >= 0, got {self.n_th}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.env_cutoff < 1:
            raise ValueError(f"env_cutoff must be >= 1, got {self.env_cutoff}")

    @property
    def n_th_injected(self) -> float:
        if self.kappa == 1.0:
            return 0.0  # nothing of the environment reaches the return
        return self.n_th / (1.0 - self.kappa)


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive map on one mode, given by stacked Kraus operators.

    `weights` records the environment weight behind each operator;
    `input_deficit` is the environment probability dropped by truncation and
    the weight floor, which bounds the completeness defect. Instances are
    immutable and safe to share across threads.
    """

    kraus: np.ndarray  # shape (n_ops, dim, dim)
    weights: np.ndarray
    input_deficit: float

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim != 3 or k.shape[1] != k.shape[2]:
            raise ValueError(f"kraus stack must have shape (n, d, d), got {k.shape}")
        k.flags.writeable = False
        object.__setattr__(self, "kraus", k)

    @property
    def dim(self) -> int:
        return self.kraus.shape[2]

    def completeness_defect(self, levels: int | None = None) -> float:
        """Max-abs deviation of sum K^dag K from identity on the leading block."""
        d = self.dim
        flat = self.kraus.reshape(-1, d)
        total = flat.conj().T @ flat
        block = slice(0, d if levels is None else max(min(levels, d), 0))
        return float(np.abs(total[block, block] - np.eye(d)[block, block]).max())

    @functools.cached_property
    def _superoperator(self) -> np.ndarray:
        # S[(i k), (j l)] = sum_n K[n, i, j] conj(K[n, k, l])
        d = self.dim
        flat = self.kraus.reshape(-1, d * d)
        g = flat.T @ flat.conj()
        return g.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)

    def apply(self, rho: DensityOperator, mode: int) -> DensityOperator:
        """Act on one mode of a density operator, other modes untouched."""
        n = rho.dims.n_modes
        if not 0 <= mode < n:
            raise ValueError(f"mode {mode} out of range for {n} modes")
        dims = rho.dims.mode_dims
        if dims[mode] != self.dim:
            raise ValueError(f"channel dimension {self.dim} does not match mode dimension {dims[mode]}")
        t = rho.matrix.reshape(dims + dims)
        t = np.moveaxis(t, (mode, n + mode), (2 * n - 2, 2 * n - 1))
        rest = t.shape[: 2 * n - 2]
        out = t.reshape(-1, self.dim * self.dim) @ self._superoperator.T
        out = np.moveaxis(out.reshape(rest + (self.dim, self.dim)), (2 * n - 2, 2 * n - 1), (mode, n + mode))
        d_tot = rho.dims.total_dim
        matrix = out.reshape(d_tot, d_tot)
        # symmetrize away the ~1e-16 roundoff so the Hermiticity gate holds
        return DensityOperator(rho.dims, 0.5 * (matrix + matrix.conj().T))


@functools.lru_cache(maxsize=32)
def thermal_attenuator_kraus(
    kappa: float,
    n_bar_env: float,
    n_max: int,
    env_cutoff: int,
    max_leakage: float | None = None,
) -> KrausChannel:
    """Beam-splitter interaction with a thermal environment, as Kraus operators.

    One operator per (environment in-level k with weight >= WEIGHT_FLOOR,
    out-level k') pair: K = sqrt(w_k) <k'| U |k> with U the two-mode
    beam-splitter unitary at transmissivity kappa. Applying the stack to a
    mode reproduces the dilate-interact-trace construction exactly (the
    small-cutoff oracle for this module). When `max_leakage` is given, the
    construction refuses environment truncation beyond it.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    w = thermal_weights(n_bar_env, env_cutoff)
    deficit = float(max(1.0 - w.sum(), 0.0))
    if max_leakage is not None and deficit > max_leakage:
        raise CutoffError(
            f"environment truncation loses {deficit:.3e} > {max_leakage:.1e} "
            f"probability; increase env_cutoff above {env_cutoff}"
        )
    theta = math.acos(math.sqrt(kappa))
    u = beam_splitter_unitary(theta, FockDims((n_max, env_cutoff)))
    d, d_env = n_max + 1, env_cutoff + 1
    u4 = u.reshape(d, d_env, d, d_env)

    ops, ws = [], []
    for k in range(d_env):
        if w[k] < WEIGHT_FLOOR:
            deficit += float(w[k])
            continue
        root = math.sqrt(w[k])
        for kp in range(d_env):
            ops.append(root * u4[:, kp, :, k])
            ws.append(w[k])
    return KrausChannel(np.array(ops), np.array(ws), deficit)


@functools.lru_cache(maxsize=32)
def pure_loss_kraus(eta: float, n_max: int) -> KrausChannel:
    """Amplitude damping: E_k loses exactly k photons with transmissivity eta."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    d = n_max + 1
    ops = np.zeros((d, d, d), dtype=complex)
    for k in range(d):
        for n in range(k, d):
            ops[k, n - k, n] = math.sqrt(math.comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
    return KrausChannel(ops, np.ones(d), 0.0)


def pure_loss(rho: DensityOperator, mode: int, eta: float) -> DensityOperator:
    """Attenuate one mode against a vacuum environment; trace preserving."""
    cutoff = rho.dims.per_mode_cutoff[mode]
    return pure_loss_kraus(eta, cutoff).apply(rho, mode)


def _as_density(probe) -> DensityOperator:
    if isinstance(probe, FockRegister):
        return probe.density()
    if isinstance(probe, DensityOperator):
        return probe
    # late import keeps the module dependency one-way
    from .engineer import ConditionalOutcome

    if isinstance(probe, ConditionalOutcome):
        return _as_density(probe.state)
    raise TypeError(f"cannot interpret {type(probe).__name__} as a probe state")


def hypothesis_pair(probe, params: ChannelParams) -> tuple[DensityOperator, DensityOperator]:
    """Build the target-absent / target-present state pair for a probe.

    Target absent: idler marginal next to a thermal return at n_th. Target
    present: the thermal attenuator at reflectivity kappa applied to the
    signal mode, with the environment occupation boosted so the return
    background stays at n_th.
    """
    dens = _as_density(probe)
    if dens.dims.n_modes != 2:
        raise ValueError("hypothesis construction expects a two-mode probe")
    cut_b = dens.dims.per_mode_cutoff[1]

    rho_a = partial_trace(dens, (0,))
    rho0 = tensor(rho_a, thermal_state(params.n_th, cut_b))
    if params.kappa == 1.0:
        rho1 = dens
    else:
        ch = thermal_attenuator_kraus(params.kappa, params.n_th_injected, cut_b, params.env_cutoff)
        rho1 = ch.apply(dens, 1)
    return rho0, rho1
