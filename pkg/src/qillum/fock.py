"""Dense linear algebra on truncated Fock spaces.

States are complex vectors indexed by a mixed-radix multi-index over the
modes (leftmost mode most significant), operators are dense complex
matrices. All values are immutable after construction and every function is
pure, so results can be shared freely across threads.
"""

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

# Relative threshold below which eigenvalues are treated as exact zeros;
# below double-precision eigensolver noise for the matrix sizes used here.
EIG_CLAMP_REL = 1e-12
# Hermiticity tolerance for operator-valued inputs.
HERMITICITY_ATOL = 1e-8
# Truncation (probability weight above the cutoff) is reported, never
# silently renormalized; above this value a warning is emitted.
LEAKAGE_WARN = 1e-6


class NumericalIntegrityError(RuntimeError):
    """A numerical tolerance the library guarantees was breached."""


class CutoffError(ValueError):
    """The requested computation does not fit in the truncated space."""


@dataclass(frozen=True)
class FockDims:
    """Per-mode photon-number cutoffs; the dimension of a mode is cutoff + 1."""

    per_mode_cutoff: tuple[int, ...]

    def __post_init__(self):
        cuts = tuple(int(c) for c in self.per_mode_cutoff)
        if not cuts or any(c < 1 for c in cuts):
            raise ValueError(f"every per-mode cutoff must be >= 1, got {cuts}")
        object.__setattr__(self, "per_mode_cutoff", cuts)

    @property
    def n_modes(self) -> int:
        return len(self.per_mode_cutoff)

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.per_mode_cutoff)

    @property
    def total_dim(self) -> int:
        return math.prod(self.mode_dims)

    def combined(self, other: "FockDims") -> "FockDims":
        return FockDims(self.per_mode_cutoff + other.per_mode_cutoff)

    def index(self, occupation: tuple[int, ...]) -> int:
        """Flat index of a basis state, leftmost mode most significant."""
        return int(np.ravel_multi_index(occupation, self.mode_dims))


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FockRegister:
    """Pure state on a multi-mode truncated Fock space."""

    dims: FockDims
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _freeze(self.amplitudes)
        if amp.shape != (self.dims.total_dim,):
            raise ValueError(
                f"amplitude vector has shape {amp.shape}, "
                f"expected ({self.dims.total_dim},)"
            )
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def basis(cls, dims: FockDims, occupation: tuple[int, ...]) -> "FockRegister":
        amp = np.zeros(dims.total_dim, dtype=complex)
        amp[dims.index(occupation)] = 1.0
        return cls(dims, amp)

    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "FockRegister":
        nrm = math.sqrt(self.squared_norm())
        if nrm == 0.0:
            raise ValueError("cannot normalize a zero state")
        return FockRegister(self.dims, self.amplitudes / nrm)

    def density(self) -> "DensityOperator":
        return DensityOperator(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian operator on a multi-mode truncated Fock space."""

    dims: FockDims
    matrix: np.ndarray

    def __post_init__(self):
        m = _freeze(self.matrix)
        d = self.dims.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix has shape {m.shape}, expected ({d}, {d})")
        dev = np.abs(m - m.conj().T).max()
        if dev > 1e-10:
            raise ValueError(f"matrix is not Hermitian (max asymmetry {dev:.3e})")
        object.__setattr__(self, "matrix", m)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def trace_deficit(self) -> float:
        """Probability weight lost to truncation, 1 - trace."""
        return 1.0 - self.trace()


@dataclass(frozen=True)
class ModeOperator:
    """Single-mode operator with its dimension metadata."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = _freeze(self.matrix)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"matrix has shape {m.shape}, expected ({self.dim}, {self.dim})")
        object.__setattr__(self, "matrix", m)


def annihilation(n_max: int) -> ModeOperator:
    """Ladder operator with <n-1|a|n> = sqrt(n) on dimension n_max + 1."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return ModeOperator(n_max + 1, np.diag(np.sqrt(np.arange(1, n_max + 1)), 1))


def creation(n_max: int) -> ModeOperator:
    a = annihilation(n_max)
    return ModeOperator(a.dim, a.matrix.conj().T)


def number_operator(n_max: int) -> ModeOperator:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return ModeOperator(n_max + 1, np.diag(np.arange(n_max + 1, dtype=float)).astype(complex))


def beam_splitter_generator(dims: FockDims) -> np.ndarray:
    """Anti-Hermitian generator a (x) b^dag - a^dag (x) b on a two-mode space.

    Real antisymmetric in the number basis, so the exponential stays in real
    arithmetic.
    """
    if dims.n_modes != 2:
        raise ValueError("beam splitter acts on exactly two modes")
    a = annihilation(dims.per_mode_cutoff[0]).matrix.real
    b = annihilation(dims.per_mode_cutoff[1]).matrix.real
    return np.kron(a, b.T) - np.kron(a.T, b)


@functools.lru_cache(maxsize=64)
def _bs_unitary_cached(theta: float, cutoffs: tuple[int, ...]) -> np.ndarray:
    gen = beam_splitter_generator(FockDims(cutoffs))
    u = scipy.linalg.expm(theta * gen).astype(complex)
    u.flags.writeable = False
    return u


def beam_splitter_unitary(theta: float, dims: FockDims) -> np.ndarray:
    """Two-mode beam-splitter unitary exp(theta (a b^dag - a^dag b)).

    The first mode of `dims` carries the `a` ladder operators. The result is
    exactly unitary on the truncated space; deviations from the untruncated
    transformation are confined to the top Fock levels. The returned array is
    cached and read-only.
    """
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    if dims.n_modes != 2:
        raise ValueError("beam splitter acts on exactly two modes")
    return _bs_unitary_cached(float(theta), dims.per_mode_cutoff)


def thermal_weights(n_bar: float, n_max: int) -> np.ndarray:
    """Photon-number distribution n_bar^n / (1 + n_bar)^(n+1) up to n_max."""
    if n_bar < 0:
        raise ValueError(f"mean photon number must be >= 0, got {n_bar}")
    if n_bar == 0:
        w = np.zeros(n_max + 1)
        w[0] = 1.0
        return w
    ratio = n_bar / (1.0 + n_bar)
    return ratio ** np.arange(n_max + 1) / (1.0 + n_bar)


def thermal_state(n_bar: float, n_max: int) -> DensityOperator:
    """Thermal state truncated at n_max; the trace deficit is the tail weight."""
    w = thermal_weights(n_bar, n_max)
    deficit = 1.0 - w.sum()
    if deficit > LEAKAGE_WARN:
        warnings.warn(
            f"thermal state at n_bar={n_bar} loses {deficit:.3e} probability "
            f"above cutoff {n_max}",
            stacklevel=2,
        )
    return DensityOperator(FockDims((n_max,)), np.diag(w).astype(complex))


def tensor(a, b):
    """Kronecker product of two registers or two density operators."""
    if isinstance(a, FockRegister) and isinstance(b, FockRegister):
        return FockRegister(a.dims.combined(b.dims), np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(a.dims.combined(b.dims), np.kron(a.matrix, b.matrix))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduce a density operator to the modes in `keep` (original order)."""
    keep = sorted(set(int(k) for k in keep))
    n = rho.dims.n_modes
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep={keep} is not a non-empty subset of modes 0..{n - 1}")
    dims = rho.dims.mode_dims
    t = rho.matrix.reshape(dims + dims)

    letters = "abcdefghijklm"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for m in range(n):
        if m not in keep:
            col[m] = row[m]
    out_sub = "".join(row[m] for m in keep) + "".join(letters[n + m] for m in keep)
    reduced = np.einsum("".join(row + col) + "->" + out_sub, t)

    d_out = math.prod(dims[m] for m in keep)
    new_dims = FockDims(tuple(rho.dims.per_mode_cutoff[m] for m in keep))
    return DensityOperator(new_dims, reduced.reshape(d_out, d_out))


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, DensityOperator):
        return op.matrix
    if isinstance(op, ModeOperator):
        return op.matrix
    return np.asarray(op, dtype=complex)


def _require_hermitian(m: np.ndarray, what: str, atol: float = HERMITICITY_ATOL):
    dev = np.abs(m - m.conj().T).max() if m.size else 0.0
    if dev > atol:
        raise ValueError(f"{what} requires a Hermitian matrix (max asymmetry {dev:.3e})")


def clamped_eigh(op) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with eigenvalues below EIG_CLAMP_REL * max set to 0."""
    m = _as_matrix(op)
    _require_hermitian(m, "clamped_eigh")
    vals, vecs = np.linalg.eigh(m)
    top = vals.max() if vals.size else 0.0
    if top <= 0.0:
        return np.zeros_like(vals), vecs
    vals = np.where(vals < EIG_CLAMP_REL * top, 0.0, vals)
    return vals, vecs


def hermitian_power(rho, s: float) -> np.ndarray:
    """Fractional power rho^s of a PSD matrix, s in [0, 1].

    Eigenvalues below EIG_CLAMP_REL times the largest are clamped to exact
    zeros before the power map; 0^s = 0 for s > 0 and 0^0 = 0, so s = 0
    yields the projector onto the support.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    vals, vecs = clamped_eigh(rho)
    if s == 0.0:
        powered = (vals > 0.0).astype(float)
    elif s == 1.0:
        powered = vals
    else:
        powered = np.where(vals > 0.0, vals, 1.0) ** s * (vals > 0.0)
    return (vecs * powered) @ vecs.conj().T


def trace_norm(delta) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    m = _as_matrix(delta)
    _require_hermitian(m, "trace_norm")
    return float(np.abs(np.linalg.eigvalsh(m)).sum())
