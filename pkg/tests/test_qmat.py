import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import close, seeds
from entpur import qmat
from entpur.states import bell_state, product_state, random_density, werner
from entpur.unitary import haar_unitary


def test_kron_examples():
    assert close(qmat.kron(np.eye(2), np.eye(2)), np.eye(4))
    assert close(qmat.kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    x = np.array([[0, 1], [1, 0]])
    d = np.diag([2, 3])
    z = np.zeros((2, 2))
    assert close(qmat.kron(x, d), np.block([[z, d], [d, z]]))


def test_partial_trace_examples():
    bell = qmat.projector(bell_state(0))
    assert close(qmat.partial_trace(bell, [2, 2], [0]), np.eye(2) / 2, 1e-12)
    ra, rb = random_density(2, seed=1), random_density(3, seed=2)
    assert close(qmat.partial_trace(np.kron(ra, rb), [2, 3], [0]), ra, 1e-12)
    assert close(qmat.partial_trace(np.kron(ra, rb), [2, 3], [1]), rb, 1e-12)
    for e in (0.0, 0.3, 0.7, 1.0):
        assert close(werner(e).rho_b(), np.eye(2) / 2, 1e-12)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(ValueError):
        qmat.partial_trace(np.eye(4), [2, 3], [0])
    with pytest.raises(ValueError):
        qmat.partial_trace(np.ones((4, 3)), [2, 2], [0])


def test_eigh_examples():
    assert close(qmat.eigh(np.eye(4)).eigenvalues, [1, 1, 1, 1])
    sp = qmat.eigh(np.diag([0.3, 0.7]))
    assert close(sp.eigenvalues, [0.7, 0.3])
    assert close(np.abs(sp.eigenvectors), [[0, 1], [1, 0]])
    assert close(qmat.eigh(werner(0.7).rho).eigenvalues, [0.7, 0.1, 0.1, 0.1], 1e-12)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValueError):
        qmat.eigh(np.array([[0, 1], [0, 0]]))


@given(seeds())
def test_eigh_reconstruction(seed):
    m = random_density(5, seed=seed)
    sp = qmat.eigh(m)
    rec = (sp.eigenvectors * sp.eigenvalues) @ sp.eigenvectors.conj().T
    assert np.linalg.norm(m - rec) <= 1e-9
    assert np.all(np.diff(sp.eigenvalues) <= 1e-15)


def test_entropy_examples():
    assert qmat.von_neumann_entropy(qmat.projector(np.array([1, 1j, 0]) / np.sqrt(2))) == pytest.approx(0, abs=1e-12)
    assert qmat.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2, abs=1e-12)
    assert qmat.von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(0.811278, abs=1e-6)


def test_entropy_rejects_invalid():
    with pytest.raises(ValueError):
        qmat.von_neumann_entropy(np.diag([0.5, 0.4]))
    with pytest.raises(ValueError):
        qmat.von_neumann_entropy(np.diag([1.1, -0.1]))


def test_entropy_clamps_tiny_negative():
    assert qmat.von_neumann_entropy(np.diag([1 + 1e-11, -1e-11])) == pytest.approx(0, abs=1e-9)


def test_binary_entropy():
    assert qmat.binary_entropy(0.5) == pytest.approx(1)
    assert qmat.binary_entropy(0) == 0
    assert qmat.binary_entropy(1) == 0
    assert qmat.binary_entropy(0.2) == pytest.approx(0.721928, abs=1e-6)
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            qmat.binary_entropy(bad)


def test_fidelity_examples():
    rho = random_density(3, seed=4)
    f, d = qmat.fidelity_and_bures(rho, rho)
    assert f == pytest.approx(1, abs=1e-9) and d == pytest.approx(0, abs=1e-4)
    p0, p1 = np.diag([1.0, 0]), np.diag([0, 1.0])
    assert qmat.fidelity_and_bures(p0, p1) == pytest.approx((0, 2))
    f, d = qmat.fidelity_and_bures(np.eye(2) / 2, p0)
    assert f == pytest.approx(2 ** -0.5, abs=1e-9)
    assert d == pytest.approx(1.08239, abs=1e-5)
    with pytest.raises(ValueError):
        qmat.fidelity_and_bures(np.eye(2) / 2, np.eye(3) / 3)


@given(seeds())
def test_fidelity_range(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(4, seed=rng), random_density(4, rank=2, seed=rng)
    f, d = qmat.fidelity_and_bures(a, b)
    assert -1e-12 <= f <= 1 + 1e-9
    assert d == pytest.approx(2 * np.sqrt(1 - min(f, 1)))


def test_trace_distance_examples():
    rho = random_density(3, seed=5)
    assert qmat.trace_distance(rho, rho) == pytest.approx(0, abs=1e-12)
    assert qmat.trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(2)
    assert qmat.trace_distance(np.diag([0.6, 0.4]), np.diag([0.5, 0.5])) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        qmat.trace_distance(np.eye(2), np.eye(3))


@given(seeds(), st.integers(2, 6))
def test_entropy_unitary_invariance(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density(d, seed=rng)
    u = haar_unitary(d, rng)
    assert qmat.von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(qmat.von_neumann_entropy(rho), abs=1e-9)


@given(seeds(), st.integers(2, 3), st.integers(2, 3))
def test_subadditivity_and_triangle(seed, da, db):
    rho = random_density(da * db, rank=int(np.random.default_rng(seed).integers(1, da * db + 1)), seed=seed)
    s_ab = qmat.von_neumann_entropy(rho)
    s_a = qmat.von_neumann_entropy(qmat.partial_trace(rho, [da, db], [0]))
    s_b = qmat.von_neumann_entropy(qmat.partial_trace(rho, [da, db], [1]))
    assert s_ab <= s_a + s_b + 1e-9
    assert abs(s_a - s_b) <= s_ab + 1e-9


@given(seeds())
def test_partial_trace_composes(seed):
    dims = [2, 3, 2, 2]
    rho = random_density(int(np.prod(dims)), rank=3, seed=seed)
    once = qmat.partial_trace(rho, dims, [2, 3])
    step = qmat.partial_trace(rho, dims, [1, 2, 3])
    step = qmat.partial_trace(step, [3, 2, 2], [1, 2])
    assert close(once, step, 1e-12)
    assert np.trace(once).real == pytest.approx(1, abs=1e-12)


@given(seeds())
def test_trace_distance_invariance_and_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density(4, seed=rng) for _ in range(3))
    u = haar_unitary(4, rng)
    conj = lambda m: u @ m @ u.conj().T  # noqa: E731
    assert qmat.trace_distance(conj(a), conj(b)) == pytest.approx(qmat.trace_distance(a, b), abs=1e-9)
    assert qmat.trace_distance(a, c) <= qmat.trace_distance(a, b) + qmat.trace_distance(b, c) + 1e-9


def test_product_state_entropy_additive():
    s = product_state(random_density(2, seed=1), random_density(3, seed=2))
    assert s.entropy() == pytest.approx(s.entropy_a() + s.entropy_b(), abs=1e-9)
