"""Eigensolver, exponential, and Lanczos tests against independent oracles."""

import numpy as np
import pytest
import scipy.linalg

from clusterprep.linalg import ConvergenceError, Spectrum, eigh, expm_scaled, lanczos_lowest
from clusterprep.models import build_chain_1d, plaquette_ring_term
from clusterprep.pauli import OperatorSum, PauliString, operator_matvec, to_dense


def random_hermitian(rng, dim: int, complex_entries: bool = True) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    if complex_entries:
        a = a + 1j * rng.standard_normal((dim, dim))
    return a + a.conj().T


def test_eigh_reconstruction_and_orthonormality():
    rng = np.random.default_rng(31)
    for dim in (2, 3, 7, 16, 33, 64, 128, 256):
        h = random_hermitian(rng, dim)
        spec = eigh(h)
        scale = np.abs(h).max()
        recon = (spec.vectors * spec.values) @ spec.vectors.conj().T
        assert np.abs(recon - h).max() <= 1e-9 * scale
        gram = spec.vectors.conj().T @ spec.vectors
        assert np.abs(gram - np.eye(dim)).max() <= 1e-12
        assert np.all(np.diff(spec.values) >= 0)
        assert abs(spec.values.sum() - np.trace(h).real) <= 1e-9 * max(1.0, scale) * dim


def test_eigh_gauge_is_reproducible():
    rng = np.random.default_rng(8)
    h = random_hermitian(rng, 24)
    vectors = eigh(h).vectors
    # leading non-negligible entry of every column is real and positive
    for i in range(24):
        col = vectors[:, i]
        lead = int(np.argmax(np.abs(col) > 1e-12 * np.abs(col).max()))
        assert col[lead].real > 0
        assert abs(col[lead].imag) <= 1e-12
    again = eigh(h.copy()).vectors
    assert np.abs(vectors - again).max() == 0.0


def test_eigh_validation():
    with pytest.raises(ValueError, match="square"):
        eigh(np.zeros((2, 3)))
    bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        eigh(bad)
    eigh(bad, check=False)  # symmetrized instead of rejected
    with pytest.raises(ValueError, match="dense limit"):
        eigh(np.zeros((4097, 4097)))


def test_spectrum_accessors():
    spec = Spectrum(np.array([-1.0, 2.0, 5.0]), np.eye(3))
    assert spec.dim == 3
    assert spec.ground_energy() == -1.0
    assert spec.gap() == 3.0


def test_expm_scaled_examples():
    z = np.diag([1.0, -1.0])
    np.testing.assert_allclose(expm_scaled(z, -1.0), np.diag([np.e**-1, np.e]), atol=1e-14)
    np.testing.assert_allclose(expm_scaled(z, 0.0), np.eye(2), atol=0)
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(expm_scaled(x, -1j * np.pi / 2), -1j * x, atol=1e-14)


def test_expm_scaled_against_scipy():
    rng = np.random.default_rng(12)
    for _ in range(10):
        h = random_hermitian(rng, 12)
        for s in (-0.3, 0.5j, -1.7j, 0.2 + 0.0j):
            ours = expm_scaled(h, s)
            oracle = scipy.linalg.expm(s * h)
            assert np.abs(ours - oracle).max() <= 1e-8 * np.abs(oracle).max()


def test_expm_scaled_unitary_for_imaginary_argument():
    rng = np.random.default_rng(13)
    h = random_hermitian(rng, 16)
    u = expm_scaled(h, -0.37j)
    assert np.abs(u @ u.conj().T - np.eye(16)).max() <= 1e-10


def test_lanczos_single_qubit():
    op = OperatorSum(1, [(1.0, PauliString.from_label("Z"))])
    values = lanczos_lowest(operator_matvec(op), 2, k=1, seed=0)
    np.testing.assert_allclose(values, [-1.0], atol=1e-10)


def test_lanczos_recovers_degenerate_ground_pair():
    # the four-spin ZZ ring has a doubly degenerate ground level at -4J
    ring = plaquette_ring_term(1.0)
    values = lanczos_lowest(operator_matvec(ring), 16, k=2, seed=1)
    np.testing.assert_allclose(values, [-4.0, -4.0], atol=1e-9)


def test_lanczos_matches_dense_on_chain():
    _, ham = build_chain_1d(5, 1.0, 0.3)
    dim = 1 << 10
    values = lanczos_lowest(operator_matvec(ham), dim, k=2, seed=2)
    dense = np.linalg.eigvalsh(to_dense(ham))
    np.testing.assert_allclose(values, dense[:2], atol=1e-8)


def test_lanczos_random_operators_match_dense():
    rng = np.random.default_rng(77)
    mask = (1 << 5) - 1
    for _ in range(50):
        terms = []
        for _ in range(6):
            x = int(rng.integers(0, mask + 1))
            z = int(rng.integers(0, mask + 1))
            if x or z:
                terms.append((float(rng.normal()), PauliString(5, x, z)))
        op = OperatorSum(5, terms)
        if op.n_terms == 0:
            continue
        values = lanczos_lowest(operator_matvec(op), 32, k=3, seed=int(rng.integers(1 << 30)))
        dense = np.linalg.eigvalsh(to_dense(op))
        assert np.abs(values - dense[:3]).max() <= 1e-8


def test_lanczos_k_validation():
    op = OperatorSum(1, [(1.0, PauliString.from_label("Z"))])
    mv = operator_matvec(op)
    with pytest.raises(ValueError):
        lanczos_lowest(mv, 2, k=0, seed=0)
    with pytest.raises(ValueError):
        lanczos_lowest(mv, 2, k=3, seed=0)


def test_lanczos_deterministic_for_fixed_seed():
    _, ham = build_chain_1d(3, 1.0, 0.2)
    mv = operator_matvec(ham)
    a = lanczos_lowest(mv, 64, k=2, seed=9)
    b = lanczos_lowest(mv, 64, k=2, seed=9)
    np.testing.assert_array_equal(a, b)


def test_convergence_error_is_runtime_error():
    assert issubclass(ConvergenceError, RuntimeError)
