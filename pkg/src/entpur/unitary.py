"""Random unitaries/isometries and a generator parameterization of isometries.

An isometry ``V: C^K -> C^D`` is written as the first ``K`` columns of
``W exp(iH)``, where ``W`` is a fixed ``D × D`` base unitary and ``H`` is
Hermitian with nonzero entries only in its first ``K`` rows and columns. For
``K == D`` this is a plain ``exp(iH)`` with ``D²`` real coordinates; for
``K < D`` the remaining block of ``H`` would only rotate the unused columns,
so it is dropped.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """Accept an int, a sequence of ints, a SeedSequence, a Generator or None."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def start_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for start ``index`` of a multi-start run."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed ``d × d`` unitary (QR of a Ginibre matrix, phases fixed)."""
    rng = make_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """Haar-random ``rows × cols`` isometry: leading columns of a Haar unitary."""
    if rows < cols:
        raise ValueError(f"isometry needs rows >= cols, got {rows} x {cols}")
    return haar_unitary(rows, seed)[:, :cols]


def _phi(w: np.ndarray) -> np.ndarray:
    # divided differences of exp(i w): exp(i(wj+wk)/2) * sin(δ)/δ, δ = (wj-wk)/2
    s = w[:, None] + w[None, :]
    d = w[:, None] - w[None, :]
    return np.exp(0.5j * s) * np.sinc(d / (2.0 * np.pi))


class IsometryGenerator:
    """Real-vector coordinates for ``D × K`` isometries.

    Parameters
    ----------
    rows, cols : int
        ``D`` and ``K``.
    base : ndarray, optional
        ``D × D`` unitary ``W`` applied after ``exp(iH)``; identity by default,
        so that zero parameters give the embedding ``[I_K; 0]``.
    """

    def __init__(self, rows: int, cols: int, base: np.ndarray | None = None):
        if rows < cols or cols < 1:
            raise ValueError(f"isometry needs rows >= cols >= 1, got {rows} x {cols}")
        self.rows, self.cols = int(rows), int(cols)
        self.base = None if base is None else np.asarray(base, dtype=complex)
        iu, ju = np.triu_indices(self.rows, k=1)
        mask = iu < self.cols
        self._pi, self._pj = iu[mask], ju[mask]
        self._diag = np.arange(self.cols)
        self.size = self.cols + 2 * self._pi.size

    def hermitian(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.size,):
            raise ValueError(f"expected {self.size} parameters, got shape {params.shape}")
        k, n = self.cols, self._pi.size
        h = np.zeros((self.rows, self.rows), dtype=complex)
        h[self._diag, self._diag] = params[:k]
        off = params[k:k + n] + 1j * params[k + n:]
        h[self._pi, self._pj] = off
        h[self._pj, self._pi] = off.conj()
        return h

    def _decompose(self, params):
        w, q = np.linalg.eigh(self.hermitian(params))
        return w, q

    def unitary(self, params) -> np.ndarray:
        w, q = self._decompose(params)
        u = (q * np.exp(1j * w)) @ q.conj().T
        return u if self.base is None else self.base @ u

    def isometry(self, params) -> np.ndarray:
        w, q = self._decompose(params)
        v = (q * np.exp(1j * w)) @ q.conj().T[:, :self.cols]
        return v if self.base is None else self.base @ v

    def isometry_and_pullback(self, params):
        """Return ``V(params)`` and a function mapping ``∂F/∂V̄`` to ``∂F/∂params``.

        The gradient convention is ``dF = Re Tr(G† dV)``.
        """
        w, q = self._decompose(params)
        qh = q.conj().T
        v = (q * np.exp(1j * w)) @ qh[:, :self.cols]
        if self.base is not None:
            v = self.base @ v
        phi_c = np.conj(_phi(w))

        def pullback(g_v: np.ndarray) -> np.ndarray:
            if self.base is not None:
                g_v = self.base.conj().T @ g_v
            g_u = np.zeros((self.rows, self.rows), dtype=complex)
            g_u[:, :self.cols] = g_v
            # adjoint of the Fréchet derivative of exp at A = iH is its derivative at A† = -iH
            g_a = q @ ((qh @ g_u @ q) * phi_c) @ qh
            z = np.conj(g_a)
            zd = z[self._diag, self._diag]
            zij, zji = z[self._pi, self._pj], z[self._pj, self._pi]
            return np.concatenate([-zd.imag, -(zij + zji).imag, (zji - zij).real])

        return v, pullback
