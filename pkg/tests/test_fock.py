import math

import numpy as np
import pytest
import scipy.linalg

from conftest import random_density, random_pure
from qillum.fock import (
    DensityOperator,
    FockDims,
    FockRegister,
    annihilation,
    beam_splitter_generator,
    beam_splitter_unitary,
    creation,
    hermitian_power,
    partial_trace,
    tensor,
    thermal_state,
    trace_norm,
)


# --- independent oracles -----------------------------------------------------

def taylor_expm(generator: np.ndarray, terms: int = 20) -> np.ndarray:
    """Scaled 20-term Taylor series with repeated squaring."""
    norm = np.linalg.norm(generator, 1)
    squarings = max(int(math.ceil(math.log2(max(norm, 1e-300) / 0.5))), 0)
    g = generator / 2**squarings
    out = np.eye(g.shape[0], dtype=complex)
    term = np.eye(g.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ g / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def series_apply(generator: np.ndarray, vec: np.ndarray, terms: int = 60) -> np.ndarray:
    """Apply exp(G) to a vector by direct series summation."""
    out = vec.astype(complex).copy()
    term = vec.astype(complex).copy()
    for k in range(1, terms + 1):
        term = generator @ term / k
        out = out + term
    return out


def partial_trace_loops(rho: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Brute-force index summation, written independently of the library."""
    n = len(dims)
    keep = tuple(sorted(keep))
    drop = tuple(m for m in range(n) if m not in keep)
    d_out = int(np.prod([dims[m] for m in keep]))
    out = np.zeros((d_out, d_out), dtype=complex)
    t = rho.reshape(dims + dims)
    for row in np.ndindex(*[dims[m] for m in keep]):
        for col in np.ndindex(*[dims[m] for m in keep]):
            acc = 0.0 + 0.0j
            for diag in np.ndindex(*[dims[m] for m in drop]):
                ri = [0] * n
                ci = [0] * n
                for pos, m in enumerate(keep):
                    ri[m] = row[pos]
                    ci[m] = col[pos]
                for pos, m in enumerate(drop):
                    ri[m] = diag[pos]
                    ci[m] = diag[pos]
                acc += t[tuple(ri) + tuple(ci)]
            i = int(np.ravel_multi_index(row, [dims[m] for m in keep]))
            j = int(np.ravel_multi_index(col, [dims[m] for m in keep]))
            out[i, j] = acc
    return out


# --- ladder operators --------------------------------------------------------

def test_annihilation_entries():
    a = annihilation(2).matrix
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(math.sqrt(2.0))
    vacuum = np.array([1.0, 0.0, 0.0])
    assert np.all(a @ vacuum == 0.0)


def test_annihilation_rejects_small_cutoff():
    with pytest.raises(ValueError):
        annihilation(0)


def test_creation_is_adjoint():
    assert np.array_equal(creation(5).matrix, annihilation(5).matrix.conj().T)


# --- beam splitter -----------------------------------------------------------

def test_beam_splitter_theta_zero_is_identity():
    dims = FockDims((4, 4))
    u = beam_splitter_unitary(0.0, dims)
    assert np.abs(u - np.eye(dims.total_dim)).max() < 1e-14


def test_beam_splitter_single_photon_splitting():
    dims = FockDims((3, 3))
    gen = math.pi / 4 * beam_splitter_generator(dims)
    u = beam_splitter_unitary(math.pi / 4, dims)
    vec = FockRegister.basis(dims, (1, 0)).amplitudes
    expected = series_apply(gen, vec)
    assert np.abs(u @ vec - expected).max() < 1e-12
    out = u @ vec
    # balanced splitting of one photon, relative sign fixed by the generator
    assert abs(out[dims.index((1, 0))]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert abs(out[dims.index((0, 1))]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_beam_splitter_two_photon_bunching():
    dims = FockDims((4, 4))
    gen = math.pi / 4 * beam_splitter_generator(dims)
    u = beam_splitter_unitary(math.pi / 4, dims)
    vec = FockRegister.basis(dims, (1, 1)).amplitudes
    out = u @ vec
    assert np.abs(out - series_apply(gen, vec)).max() < 1e-12
    hom = np.zeros(dims.total_dim, dtype=complex)
    hom[dims.index((2, 0))] = 1 / math.sqrt(2)
    hom[dims.index((0, 2))] = -1 / math.sqrt(2)
    assert abs(np.vdot(hom, out)) == pytest.approx(1.0, abs=1e-12)
    assert abs(out[dims.index((1, 1))]) < 1e-12


def test_beam_splitter_matches_taylor_oracle_at_cutoff_30():
    dims = FockDims((30, 30))
    theta = math.pi / 4
    u = beam_splitter_unitary(theta, dims)
    oracle = taylor_expm(theta * beam_splitter_generator(dims))
    assert np.abs(u - oracle).max() < 1e-10


def test_beam_splitter_unitarity():
    dims = FockDims((24, 24))
    u = beam_splitter_unitary(0.3, dims)
    assert np.abs(u @ u.conj().T - np.eye(dims.total_dim)).max() < 1e-9


def test_beam_splitter_rejects_bad_input():
    with pytest.raises(ValueError):
        beam_splitter_unitary(math.nan, FockDims((3, 3)))
    with pytest.raises(ValueError):
        beam_splitter_unitary(0.1, FockDims((3, 3, 3)))


# --- thermal state -----------------------------------------------------------

def test_thermal_zero_temperature():
    rho = thermal_state(0.0, 5)
    expected = np.zeros((6, 6))
    expected[0, 0] = 1.0
    assert np.abs(rho.matrix - expected).max() == 0.0


def test_thermal_trace_deficit_geometric():
    rho = thermal_state(1.0, 24)
    assert rho.trace() == pytest.approx(1.0 - 2.0**-25, abs=1e-15)
    assert rho.matrix[0, 0].real == pytest.approx(0.5, abs=1e-15)


def test_thermal_rejects_negative_occupation():
    with pytest.raises(ValueError):
        thermal_state(-0.1, 5)


def test_thermal_warns_on_large_tail():
    with pytest.warns(UserWarning, match="probability"):
        thermal_state(5.0, 4)


# --- tensor and partial trace ------------------------------------------------

def test_tensor_basis_states():
    a = FockRegister.basis(FockDims((2,)), (0,))
    b = FockRegister.basis(FockDims((2,)), (1,))
    ab = tensor(a, b)
    assert ab.amplitudes[ab.dims.index((0, 1))] == 1.0
    assert ab.squared_norm() == pytest.approx(1.0)


@pytest.mark.filterwarnings("ignore:thermal state")
def test_tensor_trace_multiplicative(rng):
    a = random_density(rng, FockDims((3,)))
    b = thermal_state(1.0, 3)
    ab = tensor(a, b)
    assert ab.trace() == pytest.approx(a.trace() * b.trace(), abs=1e-12)


@pytest.mark.filterwarnings("ignore:thermal state")
def test_tensor_block_structure():
    ground = DensityOperator(FockDims((1,)), np.diag([1.0, 0.0]).astype(complex))
    th = thermal_state(1.0, 3)
    combined = tensor(ground, th)
    assert np.abs(combined.matrix[:4, :4] - th.matrix).max() < 1e-15
    assert np.abs(combined.matrix[4:, 4:]).max() == 0.0


@pytest.mark.filterwarnings("ignore:thermal state")
def test_tensor_rejects_mixed_kinds():
    reg = FockRegister.basis(FockDims((2,)), (0,))
    with pytest.raises(TypeError):
        tensor(reg, thermal_state(0.5, 2))


def test_partial_trace_product_state(rng):
    a = random_density(rng, FockDims((3,)))
    b = random_density(rng, FockDims((2,)))
    ab = tensor(a, b)
    back = partial_trace(ab, (0,))
    assert np.abs(back.matrix - a.matrix).max() < 1e-12


def test_partial_trace_bell_marginal():
    dims = FockDims((1, 1))
    amp = np.zeros(4, dtype=complex)
    amp[dims.index((1, 0))] = 1 / math.sqrt(2)
    amp[dims.index((0, 1))] = 1 / math.sqrt(2)
    rho = FockRegister(dims, amp).density()
    marginal = partial_trace(rho, (1,))
    assert np.abs(marginal.matrix - 0.5 * np.eye(2)).max() < 1e-12


def test_partial_trace_against_loop_oracle(rng):
    dims = FockDims((3, 3))
    rho = random_density(rng, dims)
    for keep in ((0,), (1,)):
        expected = partial_trace_loops(rho.matrix, dims.mode_dims, keep)
        got = partial_trace(rho, keep).matrix
        assert np.abs(got - expected).max() < 1e-12


def test_partial_trace_three_modes_against_loop_oracle(rng):
    dims = FockDims((2, 1, 2))
    rho = random_density(rng, dims)
    for keep in ((0,), (0, 2), (1, 2)):
        expected = partial_trace_loops(rho.matrix, dims.mode_dims, keep)
        got = partial_trace(rho, keep).matrix
        assert np.abs(got - expected).max() < 1e-12


def test_partial_trace_preserves_trace(rng):
    rho = random_density(rng, FockDims((3, 2)))
    assert partial_trace(rho, (0,)).trace() == pytest.approx(rho.trace(), abs=1e-12)


def test_partial_trace_rejects_bad_keep(rng):
    rho = random_density(rng, FockDims((2, 2)))
    with pytest.raises(ValueError):
        partial_trace(rho, ())
    with pytest.raises(ValueError):
        partial_trace(rho, (2,))


def test_tensor_then_trace_returns_factor(rng):
    a = random_density(rng, FockDims((3,)))
    b = random_density(rng, FockDims((3,)))
    back = partial_trace(tensor(a, b), (0,))
    assert np.abs(back.matrix - a.matrix * b.trace()).max() < 1e-12


# --- hermitian power ---------------------------------------------------------

def test_hermitian_power_identity_exponent(rng):
    rho = random_density(rng, FockDims((4,)))
    assert np.abs(hermitian_power(rho, 1.0) - rho.matrix).max() < 1e-12


def test_hermitian_power_diagonal_case():
    m = np.diag([0.5, 0.5]).astype(complex)
    assert np.abs(hermitian_power(m, 0.5) - np.diag([math.sqrt(0.5)] * 2)).max() < 1e-14


def test_hermitian_power_support_projector():
    v = np.array([1.0, 2.0, 2.0]) / 3.0
    proj = np.outer(v, v)
    assert np.abs(hermitian_power(proj, 0.0) - proj).max() < 1e-12


def test_hermitian_power_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_power(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.5)
    with pytest.raises(ValueError):
        hermitian_power(np.eye(2), 1.5)


def test_hermitian_power_interpolates_trace(rng):
    rho = random_density(rng, FockDims((4,)))
    for s in (0.0, 0.25, 0.5, 0.9, 1.0):
        prod = hermitian_power(rho, s) @ hermitian_power(rho, 1.0 - s)
        assert np.trace(prod).real == pytest.approx(rho.trace(), abs=1e-10)


def test_hermitian_power_against_scipy(rng):
    rho = random_density(rng, FockDims((4,)))  # full rank almost surely
    for s in (0.3, 0.7):
        expected = scipy.linalg.fractional_matrix_power(rho.matrix, s)
        assert np.abs(hermitian_power(rho, s) - expected).max() < 1e-10


# --- trace norm --------------------------------------------------------------

def test_trace_norm_zero():
    assert trace_norm(np.zeros((3, 3))) == 0.0


def test_trace_norm_diagonal():
    assert trace_norm(np.diag([0.3, -0.3])) == pytest.approx(0.6, abs=1e-14)


def test_trace_norm_orthogonal_pure_states():
    psi = np.array([1.0, 0.0])
    phi = np.array([0.0, 1.0])
    delta = np.outer(psi, psi) - np.outer(phi, phi)
    assert trace_norm(delta) == pytest.approx(2.0, abs=1e-14)


def test_trace_norm_vanishes_iff_zero(rng):
    dims = FockDims((3,))
    h = rng.standard_normal((4, 4))
    h = (h + h.T) * 1e-3
    assert trace_norm(h) > 1e-12
    assert trace_norm(np.zeros((4, 4))) <= 1e-12
    del dims


def test_trace_norm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


# --- register plumbing -------------------------------------------------------

def test_register_norm_and_normalize():
    dims = FockDims((2,))
    reg = FockRegister(dims, np.array([3.0, 0.0, 4.0]))
    assert reg.squared_norm() == pytest.approx(25.0)
    assert reg.normalized().squared_norm() == pytest.approx(1.0, abs=1e-12)


def test_register_rejects_wrong_length():
    with pytest.raises(ValueError):
        FockRegister(FockDims((2,)), np.zeros(2))


def test_density_operator_rejects_non_hermitian():
    m = np.zeros((3, 3), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ValueError):
        DensityOperator(FockDims((2,)), m)


def test_dims_validation():
    with pytest.raises(ValueError):
        FockDims((0, 3))
    with pytest.raises(ValueError):
        FockDims(())


def test_pure_state_outer_product(rng):
    dims = FockDims((3,))
    vec = random_pure(rng, dims)
    rho = FockRegister(dims, vec).density()
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert np.abs(rho.matrix @ vec - vec).max() < 1e-12
