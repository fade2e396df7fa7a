"""Dense complex linear algebra and entropy primitives.

Matrices are plain ``numpy.ndarray`` objects of complex dtype. Subsystem
ordering is always explicit: every partial trace takes the full list of
subsystem dimensions, and Kronecker products keep the first factor as the
leftmost (slowest-varying) index.

All entropies are in bits.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
NEG_EIG_TOL = 1e-10


class Spectrum(NamedTuple):
    """Eigenvalues sorted in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def kron(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` with ``a`` as the first subsystem."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, dagger(m), rtol=0, atol=tol)


def projector(psi) -> np.ndarray:
    """Return ``|ψ⟩⟨ψ|`` for a state vector ``psi``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on ``H_{dims[0]} ⊗ H_{dims[1]} ⊗ ...``.
    dims : sequence of int
        Subsystem dimensions in tensor order.
    keep : int or iterable of int
        Indices of the subsystems that survive. The output keeps them in
        their original tensor order.

    Raises
    ------
    ValueError
        If ``m`` is not square or ``prod(dims)`` differs from its size.
    """
    m = np.asarray(m, dtype=complex)
    dims = [int(d) for d in dims]
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"partial_trace needs a square matrix, got shape {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"subsystem dims {dims} do not match matrix dimension {m.shape[0]}")
    if np.isscalar(keep) or isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = sorted({int(k) for k in keep})
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")

    t = m.reshape(dims + dims)
    # einsum labels: row index i, column index (i for traced, j for kept)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def eigh(m, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Hermitian eigendecomposition with eigenvalues in descending order.

    Ties keep the ascending-solver order reversed, which is deterministic for
    a given input.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise ValueError("eigh requires a Hermitian matrix")
    m = 0.5 * (m + dagger(m))
    w, v = np.linalg.eigh(m)
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])


def check_density(rho, tol_trace: float = TRACE_TOL, tol_neg: float = NEG_EIG_TOL,
                  tol_herm: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a density matrix and return its clamped eigenvalues (descending)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho, tol_herm):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"density matrix has trace {tr:.12g}, expected 1")
    w = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[::-1]
    if w[-1] < -tol_neg:
        raise ValueError(f"density matrix has negative eigenvalue {w[-1]:.3e}")
    return np.clip(w, 0.0, None)


def entropy_of_probs(p) -> float:
    """Shannon entropy in bits with ``0 log 0 = 0``. No validation."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def von_neumann_entropy(rho) -> float:
    """``-Tr ρ log2 ρ`` for a validated density matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more negative,
    a non-unit trace, or a non-Hermitian input raises ``ValueError``.
    """
    w = check_density(rho)
    return max(entropy_of_probs(w), 0.0)


def binary_entropy(x: float) -> float:
    """``H(x) = -x log2 x - (1-x) log2 (1-x)``."""
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    return entropy_of_probs([x, 1.0 - x])


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)


def fidelity(rho, sigma) -> float:
    """Square-root fidelity ``Tr sqrt(sqrt(ρ) σ sqrt(ρ))``."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    s = _psd_sqrt(rho)
    inner = s @ sigma @ s
    w = np.linalg.eigvalsh(0.5 * (inner + dagger(inner)))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def fidelity_and_bures(rho, sigma) -> tuple[float, float]:
    """Return ``(F, D)`` with ``D = 2 sqrt(1 - F)`` the Bures distance."""
    f = fidelity(rho, sigma)
    return f, 2.0 * np.sqrt(max(0.0, 1.0 - min(f, 1.0)))


def bures_distance(rho, sigma) -> float:
    return fidelity_and_bures(rho, sigma)[1]


def trace_distance(rho, sigma) -> float:
    """``Tr|ρ - σ|`` (no factor 1/2)."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    diff = rho - sigma
    if not is_hermitian(diff, 1e-9):
        raise ValueError("trace_distance requires Hermitian inputs")
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + dagger(diff))))))


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and is_isometry(u, tol)


def is_isometry(v, tol: float = 1e-9) -> bool:
    v = np.asarray(v)
    return (v.ndim == 2 and v.shape[0] >= v.shape[1]
            and np.allclose(dagger(v) @ v, np.eye(v.shape[1]), rtol=0, atol=tol))
