"""State families: Bell, Werner, Bell-diagonal, classically correlated, random.

Also the Bell-diagonal state <-> Pauli channel correspondence
``ρ = (1 ⊗ Λ)(|Ψ0⟩⟨Ψ0|)`` and a few helpers for local processing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmat
from .unitary import haar_unitary, make_rng, random_isometry

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

PROB_TOL = 1e-12
BELL_DIAGONAL_TOL = 1e-9


def _check_distribution(p, n: int | None = None, tol: float = PROB_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if n is not None and p.size != n:
        raise ValueError(f"expected {n} probabilities, got {p.size}")
    if p.size == 0 or np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise ValueError(f"not a probability distribution: {p.tolist()}")
    return np.clip(p, 0.0, None)


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Density matrix on ``H_A ⊗ H_B`` together with its factorization."""

    rho: np.ndarray
    d_a: int
    d_b: int
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        d = int(self.d_a) * int(self.d_b)
        if self.d_a < 1 or self.d_b < 1 or rho.shape != (d, d):
            raise ValueError(f"matrix shape {rho.shape} does not match d_a·d_b = {d}")
        w = qmat.check_density(rho)
        rho.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "d_a", int(self.d_a))
        object.__setattr__(self, "d_b", int(self.d_b))
        object.__setattr__(self, "eigenvalues", w)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_a, self.d_b)

    @property
    def d_ab(self) -> int:
        return self.d_a * self.d_b

    def rank(self, tol: float = 1e-12) -> int:
        return int(np.sum(self.eigenvalues > tol))

    def rho_a(self) -> np.ndarray:
        return qmat.partial_trace(self.rho, self.dims, 0)

    def rho_b(self) -> np.ndarray:
        return qmat.partial_trace(self.rho, self.dims, 1)

    def entropy(self) -> float:
        return max(qmat.entropy_of_probs(self.eigenvalues), 0.0)

    def entropy_a(self) -> float:
        return qmat.von_neumann_entropy(self.rho_a())

    def entropy_b(self) -> float:
        return qmat.von_neumann_entropy(self.rho_b())


@dataclass(frozen=True)
class PauliChannel:
    """Qubit channel ``ρ ↦ Σ_i p_i σ_i ρ σ_i`` with ``σ_0 = 1``."""

    probs: tuple[float, float, float, float]

    def __post_init__(self):
        p = _check_distribution(self.probs, 4)
        object.__setattr__(self, "probs", tuple(float(x) for x in p))

    def kraus(self) -> list[np.ndarray]:
        return [np.sqrt(p) * s for p, s in zip(self.probs, PAULIS)]

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(p * s @ rho @ s for p, s in zip(self.probs, PAULIS))


def bell_state(i: int) -> np.ndarray:
    """``|Ψ_i⟩ = (1 ⊗ σ_i)|Ψ_0⟩`` with ``|Ψ_0⟩ = (|00⟩ + |11⟩)/√2``."""
    if i not in (0, 1, 2, 3):
        raise ValueError(f"Bell index must be 0..3, got {i}")
    psi0 = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return np.kron(PAULIS[0], PAULIS[i]) @ psi0


def bell_basis() -> np.ndarray:
    """Unitary whose columns are ``|Ψ_0⟩ .. |Ψ_3⟩``."""
    return np.column_stack([bell_state(i) for i in range(4)])


def bell_diagonal(p: Sequence[float]) -> BipartiteState:
    p = _check_distribution(p, 4)
    b = bell_basis()
    return BipartiteState((b * p) @ b.conj().T, 2, 2)


def werner(e: float) -> BipartiteState:
    """``e |Ψ0⟩⟨Ψ0| + (1-e)/3 Σ_{i=1..3} |Ψi⟩⟨Ψi|``."""
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"Werner weight e={e} outside [0, 1]")
    q = (1.0 - e) / 3.0
    return bell_diagonal([e, q, q, q])


def dephased_bell_state() -> BipartiteState:
    """Equal mixture of ``(|00⟩+|11⟩)/√2`` and ``(|00⟩-|11⟩)/√2``."""
    return bell_diagonal([0.5, 0.0, 0.0, 0.5])


def classical_correlated(p: Sequence[float], d: int | None = None) -> BipartiteState:
    """``Σ_i p_i |ii⟩⟨ii|`` on ``C^d ⊗ C^d`` (computational bases on both sides)."""
    p = _check_distribution(p)
    d = p.size if d is None else int(d)
    if p.size > d:
        raise ValueError(f"{p.size} probabilities do not fit in dimension {d}")
    diag = np.zeros(d * d)
    for i, pi in enumerate(p):
        diag[i * d + i] = pi
    return BipartiteState(np.diag(diag).astype(complex), d, d)


def pure_state(psi, d_a: int, d_b: int) -> BipartiteState:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return BipartiteState(qmat.projector(psi), d_a, d_b)


def product_state(rho_a, rho_b) -> BipartiteState:
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return BipartiteState(np.kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def channel_to_state(ch: PauliChannel) -> BipartiteState:
    """Choi-type state ``(1 ⊗ Λ)(|Ψ0⟩⟨Ψ0|)`` of a Pauli channel."""
    psi0 = qmat.projector(bell_state(0))
    big = [np.kron(PAULIS[0], s) for s in PAULIS]
    rho = sum(p * k @ psi0 @ k.conj().T for p, k in zip(ch.probs, big))
    return BipartiteState(rho, 2, 2)


def state_to_channel(bd: BipartiteState, tol: float = BELL_DIAGONAL_TOL) -> PauliChannel:
    """Inverse of :func:`channel_to_state`; rejects states that are not Bell-diagonal."""
    if bd.dims != (2, 2):
        raise ValueError("state_to_channel needs a two-qubit state")
    b = bell_basis()
    m = b.conj().T @ bd.rho @ b
    off = m - np.diag(np.diag(m))
    if np.max(np.abs(off)) > tol:
        raise ValueError(f"state is not Bell-diagonal (off-diagonal {np.max(np.abs(off)):.2e})")
    p = np.clip(np.diag(m).real, 0.0, None)
    return PauliChannel(tuple(p / p.sum()))


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random density matrix ``G G† / Tr(G G†)`` with ``G`` a ``d × rank`` Ginibre matrix."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in 1..{d}, got {rank}")
    rng = make_rng(seed)
    g = (rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))) / np.sqrt(2)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_bipartite(d_a: int, d_b: int, rank: int | None = None, seed=None) -> BipartiteState:
    return BipartiteState(random_density(d_a * d_b, rank, seed), d_a, d_b)


def local_unitary(s: BipartiteState, u_a, u_b) -> BipartiteState:
    """``(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†``."""
    u = np.kron(np.asarray(u_a, dtype=complex), np.asarray(u_b, dtype=complex))
    return BipartiteState(u @ s.rho @ u.conj().T, s.d_a, s.d_b)


def random_kraus(d_in: int, n_kraus: int, seed=None, d_out: int | None = None) -> list[np.ndarray]:
    """Kraus operators of a random channel, cut from a Haar isometry."""
    d_out = d_in if d_out is None else d_out
    v = random_isometry(d_out * n_kraus, d_in, seed)
    return [v[k * d_out:(k + 1) * d_out, :] for k in range(n_kraus)]


def apply_local_channel(s: BipartiteState, kraus: Sequence[np.ndarray], side: str = "A") -> BipartiteState:
    """Apply a channel given by Kraus operators to one side of ``s``."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    if side == "A":
        ops = [np.kron(k, np.eye(s.d_b)) for k in kraus]
        d_a, d_b = kraus[0].shape[0], s.d_b
    elif side == "B":
        ops = [np.kron(np.eye(s.d_a), k) for k in kraus]
        d_a, d_b = s.d_a, kraus[0].shape[0]
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    rho = sum(k @ s.rho @ k.conj().T for k in ops)
    rho = 0.5 * (rho + rho.conj().T)
    return BipartiteState(rho / np.trace(rho).real, d_a, d_b)


def random_local_unitaries(s: BipartiteState, seed=None) -> tuple[np.ndarray, np.ndarray]:
    rng = make_rng(seed)
    return haar_unitary(s.d_a, rng), haar_unitary(s.d_b, rng)
