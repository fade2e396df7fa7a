"""Purifications of bipartite states and their entanglement across AA'|BB'.

Amplitudes of a :class:`PurificationVector` are stored as a 4-index tensor in
the fixed order ``A, A', B, B'``; the entanglement cut is always
``(AA') | (BB')``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat
from .states import BipartiteState, bell_basis

NORM_TOL = 1e-10
REDUCTION_TOL = 1e-8
ISOMETRY_TOL = 1e-9
EIG_FLOOR = 1e-14  # eigenvalues below this are solver noise; sqrt would inflate them


@dataclass(frozen=True, eq=False)
class PurificationVector:
    amplitudes: np.ndarray
    dims: tuple[int, int, int, int]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 4 or min(dims) < 1:
            raise ValueError(f"dims must be four positive counts, got {self.dims}")
        amp = np.array(self.amplitudes, dtype=complex).reshape(dims)
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"purification vector has norm {norm:.12g}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @property
    def d_a(self):
        return self.dims[0]

    @property
    def d_ap(self):
        return self.dims[1]

    @property
    def d_b(self):
        return self.dims[2]

    @property
    def d_bp(self):
        return self.dims[3]

    def vector(self) -> np.ndarray:
        return self.amplitudes.ravel()

    def cut_matrix(self) -> np.ndarray:
        """Amplitudes as a ``(d_A d_A') × (d_B d_B')`` matrix."""
        a, ap, b, bp = self.dims
        return self.amplitudes.reshape(a * ap, b * bp)

    def reduced_bbp(self) -> np.ndarray:
        m = self.cut_matrix()
        return m.T @ m.conj()

    def reduced_aap(self) -> np.ndarray:
        m = self.cut_matrix()
        return m @ m.conj().T

    def reduced_ab(self) -> np.ndarray:
        """``Tr_{A'B'} |ψ⟩⟨ψ|`` on ``A ⊗ B``."""
        a, ap, b, bp = self.dims
        t = self.amplitudes.transpose(0, 2, 1, 3).reshape(a * b, ap * bp)
        return t @ t.conj().T

    def purifies(self, s: BipartiteState, tol: float = REDUCTION_TOL) -> bool:
        return (self.d_a, self.d_b) == s.dims and qmat.trace_distance(self.reduced_ab(), s.rho) <= tol


def _schmidt_entropy(m: np.ndarray) -> float:
    s = np.linalg.svd(m, compute_uv=False)
    return qmat.entropy_of_probs(s ** 2)


def standard_purification(s: BipartiteState) -> PurificationVector:
    """``Σ_i √λ_i |ψ_i⟩_AB |0⟩_A' |i⟩_B'`` with ``d_A' = 1`` and ``d_B' = d_A d_B``.

    Eigenpairs are ordered by descending eigenvalue; the B' register is padded
    to ``d_A d_B`` so its size does not depend on the rank of ``ρ``.
    """
    sp = qmat.eigh(s.rho)
    lam = np.where(sp.eigenvalues > EIG_FLOOR, sp.eigenvalues, 0.0)
    lam = lam / lam.sum()
    # t[a, b, i] = sqrt(λ_i) ψ_i[a, b]
    t = (sp.eigenvectors * np.sqrt(lam)).reshape(s.d_a, s.d_b, s.d_ab)
    amp = t[:, None, :, :]
    return PurificationVector(amp, (s.d_a, 1, s.d_b, s.d_ab))


def ancilla_tensor(psi: PurificationVector) -> np.ndarray:
    """Amplitudes as ``t[a, b, j]`` with ``j`` the flat ``A'B'`` index."""
    a, ap, b, bp = psi.dims
    return psi.amplitudes.transpose(0, 2, 1, 3).reshape(a, b, ap * bp)


def from_ancilla_tensor(t: np.ndarray, d_ap: int, d_bp: int) -> PurificationVector:
    a, b, _ = t.shape
    amp = t.reshape(a, b, d_ap, d_bp).transpose(0, 2, 1, 3)
    return PurificationVector(amp, (a, d_ap, b, d_bp))


def mu_state(s: BipartiteState) -> np.ndarray:
    """``μ_BB'(ρ) = Tr_AA' |ψ_s⟩⟨ψ_s|`` on ``B ⊗ B'`` (dimension ``d_B d_A d_B``)."""
    return standard_purification(s).reduced_bbp()


def apply_purifying_unitary(psi: PurificationVector, u, d_ap: int | None = None,
                            d_bp: int | None = None) -> PurificationVector:
    """Apply ``I_AB ⊗ U_A'B'`` to ``psi``.

    ``u`` may be a unitary on the current ``A'B'`` register or an isometry into
    a larger one, in which case ``d_ap`` and ``d_bp`` give the output
    factorization (defaulting to ``d_A' = 1`` for a plain enlargement).
    """
    u = np.asarray(u, dtype=complex)
    k = psi.d_ap * psi.d_bp
    if u.ndim != 2 or u.shape[1] != k:
        raise ValueError(f"operator with shape {u.shape} cannot act on an A'B' register of size {k}")
    if not qmat.is_isometry(u, ISOMETRY_TOL):
        raise ValueError("purifying operator is not an isometry")
    rows = u.shape[0]
    if d_ap is None and d_bp is None:
        if rows == k:
            d_ap, d_bp = psi.d_ap, psi.d_bp
        else:
            d_ap, d_bp = 1, rows
    elif d_ap is None:
        d_ap = rows // d_bp
    elif d_bp is None:
        d_bp = rows // d_ap
    if d_ap * d_bp != rows:
        raise ValueError(f"output dims ({d_ap}, {d_bp}) do not match operator rows {rows}")
    t = ancilla_tensor(psi)
    out = np.einsum("abk,jk->abj", t, u)
    out = out / np.linalg.norm(out)
    return from_ancilla_tensor(out, d_ap, d_bp)


def purification_entanglement(psi: PurificationVector) -> float:
    """Entropy (bits) of the ``BB'`` reduction, via the Schmidt coefficients of the cut."""
    return _schmidt_entropy(psi.cut_matrix())


def entanglement_of_pure(psi, d_a: int, d_b: int) -> float:
    """Entanglement entropy of a pure state vector on ``C^{d_a} ⊗ C^{d_b}``."""
    m = np.asarray(psi, dtype=complex).reshape(d_a, d_b)
    return _schmidt_entropy(m / np.linalg.norm(m))


def bell_ansatz_unitary(s: BipartiteState) -> np.ndarray:
    """``A'B'`` unitary taking the standard purification of a Bell-diagonal state to
    ``Σ_i √p_i |Ψ_i⟩_AB |Ψ_i*⟩_A'B'``, with the 4-dim ``B'`` register read as ``A'(2) ⊗ B'(2)``.

    Eigenvectors of ``ρ`` are arbitrary inside degenerate eigenspaces; the
    unitary undoes that choice so the result is basis independent.
    """
    if s.dims != (2, 2):
        raise ValueError("Bell ansatz needs a two-qubit state")
    b = bell_basis()
    vecs = qmat.eigh(s.rho).eigenvectors
    c = b.conj().T @ vecs  # ψ_k = Σ_i c[i, k] Ψ_i
    return b.conj() @ c.conj()


def bell_ansatz_purification(p) -> PurificationVector:
    """``Σ_i √p_i |Ψ_i⟩_AB |Ψ_i*⟩_A'B'`` built directly from Bell vectors.

    The conjugate on the ancilla copy makes this the same state for any phase
    convention of the Bell basis; with real Bell vectors it reads
    ``Σ_i √p_i |Ψ_i⟩|Ψ_i⟩``. At ``p = (1/4, 1/4, 1/4, 1/4)`` it factorizes
    into ``|Φ⟩_AA' |Φ⟩_BB'``.
    """
    p = np.asarray(p, dtype=float)
    b = bell_basis()
    # amplitudes indexed (a, b, a', b')
    t = np.einsum("i,xi,yi->xy", np.sqrt(p), b, b.conj()).reshape(2, 2, 2, 2)
    return PurificationVector(t.transpose(0, 2, 1, 3), (2, 2, 2, 2))


def ancilla_ranks(psi: PurificationVector, tol: float = 1e-6) -> tuple[int, int]:
    """Ranks of the ``A'`` and ``B'`` marginals: the smallest ancilla dims that
    hold an equivalent purification (local isometries on ``A'``, ``B'`` leave the
    entanglement unchanged)."""
    amp = psi.amplitudes
    rho_ap = np.einsum("axby,azby->xz", amp, amp.conj())
    rho_bp = np.einsum("axby,axbz->yz", amp, amp.conj())
    r = []
    for m in (rho_ap, rho_bp):
        w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        r.append(int(np.sum(w > tol)))
    return r[0], r[1]
