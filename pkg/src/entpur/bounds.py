"""Correlation quantities that bracket the entanglement of purification.

Closed forms (quantum mutual information, two-qubit entanglement of
formation, Bell-diagonal induced Holevo information) sit next to numerical
lower estimates obtained by optimizing local rank-1 POVMs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from . import qmat
from .states import PAULIS, BipartiteState, PauliChannel, _check_distribution
from .unitary import IsometryGenerator, haar_unitary, start_rng

FD_STEP = 1e-5


# --- closed forms -----------------------------------------------------------

def quantum_mutual_info(s: BipartiteState) -> float:
    """``S(ρ_A) + S(ρ_B) - S(ρ_AB)``."""
    return max(s.entropy_a() + s.entropy_b() - s.entropy(), 0.0)


def marginal_entropy_upper(s: BipartiteState) -> float:
    return min(s.entropy_a(), s.entropy_b())


def concurrence(s: BipartiteState) -> float:
    """Wootters concurrence of a two-qubit state."""
    if s.dims != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got dims {s.dims}")
    yy = np.kron(PAULIS[2], PAULIS[2])
    rho = s.rho
    rho_tilde = yy @ rho.conj() @ yy
    sq = qmat._psd_sqrt(rho)
    w = np.linalg.eigvalsh(sq @ rho_tilde @ sq)
    lam = np.sqrt(np.clip(w, 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def ef_two_qubit(s: BipartiteState) -> float:
    """Entanglement of formation ``H((1 + sqrt(1 - C²))/2)`` of a two-qubit state."""
    c = concurrence(s)
    x = 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c)))
    return qmat.binary_entropy(min(max(x, 0.0), 1.0))


def bell_diagonal_CA(p: Sequence[float]) -> float:
    """``1 - H(1 - λ)`` with ``λ`` the sum of the two largest weights."""
    p = np.sort(_check_distribution(p, 4))[::-1]
    lam = float(p[0] + p[1])
    return 1.0 - qmat.binary_entropy(min(max(1.0 - lam, 0.0), 1.0))


def werner_CA(e: float) -> float:
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"Werner weight e={e} outside [0, 1]")
    if e >= 0.25:
        return 1.0 - qmat.binary_entropy((1.0 + 2.0 * e) / 3.0)
    return 1.0 - qmat.binary_entropy((2.0 - 2.0 * e) / 3.0)


# --- Pauli channel capacity ------------------------------------------------

def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` nearly uniform points on the unit sphere as ``(θ, φ)`` pairs."""
    i = np.arange(n) + 0.5
    theta = np.arccos(1.0 - 2.0 * i / n)
    phi = np.pi * (1.0 + math.sqrt(5.0)) * i
    return np.column_stack([theta, np.mod(phi, 2 * np.pi)])


def _bloch_ket(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def pauli_capacity(ch: PauliChannel, grid: int = 128) -> float:
    """``1 - min_ψ S(Λ(|ψ⟩⟨ψ|))`` by grid search over the Bloch sphere plus simplex refinement."""
    if grid < 32:
        raise ValueError("grid must be at least 32")

    def out_entropy(x):
        psi = _bloch_ket(x[0], x[1])
        out = ch.apply(np.outer(psi, psi.conj()))
        return qmat.entropy_of_probs(np.linalg.eigvalsh(0.5 * (out + out.conj().T)))

    pts = fibonacci_sphere(grid)
    vals = np.array([out_entropy(x) for x in pts])
    best = float(vals.min())
    for idx in np.argsort(vals)[:4]:
        r = optimize.minimize(out_entropy, pts[idx], method="Nelder-Mead",
                              options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
        best = min(best, float(r.fun))
    return float(min(max(1.0 - best, 0.0), 1.0))


# --- measurement optimization ----------------------------------------------

@dataclass
class MeasurementEnsemble:
    """Rank-1 POVM ``{|e_j⟩⟨e_j|}`` built from the rows of an isometry."""

    povm_elements: list[np.ndarray]
    outcome_count: int
    rows: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_isometry(cls, w: np.ndarray) -> "MeasurementEnsemble":
        # ⟨e_j| is row j of w, so Σ_j |e_j⟩⟨e_j| = w† w = 1
        elems = [np.outer(row.conj(), row) for row in w]
        return cls(elems, len(elems), np.array(w))

    def check(self, tol: float = 1e-9) -> None:
        d = self.povm_elements[0].shape[0]
        if self.outcome_count > d * d:
            raise ValueError(f"{self.outcome_count} outcomes exceed the d² = {d * d} cap")
        total = sum(self.povm_elements)
        if not np.allclose(total, np.eye(d), atol=tol, rtol=0):
            raise ValueError("POVM elements do not sum to the identity")


def _pauli_bases() -> list[np.ndarray]:
    """Projective measurements in the Z, X, Y eigenbases, as 4×2 isometries."""
    out = []
    for s in (PAULIS[3], PAULIS[1], PAULIS[2]):
        _, v = np.linalg.eigh(s)
        w = np.zeros((4, 2), dtype=complex)
        w[:2] = v.conj().T  # rows are ⟨e_j|
        out.append(w)
    return out


def _eigbasis_isometry(rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    _, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.zeros((d * d, d), dtype=complex)
    w[:d] = v.conj().T
    return w


def _base_for(w0: np.ndarray) -> np.ndarray:
    """A unitary whose leading columns are the isometry ``w0``."""
    n, d = w0.shape
    q, _ = np.linalg.qr(np.hstack([w0, np.eye(n, dtype=complex)]))
    rest = q[:, d:n]
    rest = rest - w0 @ (w0.conj().T @ rest)
    rest, _ = np.linalg.qr(rest)
    return np.hstack([w0, rest])


def _joint_probs(rho: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> np.ndarray:
    w = np.kron(wa, wb)
    p = np.einsum("ij,jk,ik->i", w, rho, w.conj()).real
    return np.clip(p, 0.0, None).reshape(wa.shape[0], wb.shape[0])


def mutual_information(p: np.ndarray) -> float:
    """Mutual information (bits) of a joint distribution given as a 2-D array."""
    p = np.asarray(p, dtype=float)
    p = p / p.sum()
    return max(qmat.entropy_of_probs(p.sum(1)) + qmat.entropy_of_probs(p.sum(0))
               - qmat.entropy_of_probs(p), 0.0)


def _fd_grad(f, x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    g = np.empty_like(x)
    y = x.copy()
    for i in range(x.size):
        y[i] = x[i] + h
        fp = f(y)
        y[i] = x[i] - h
        fm = f(y)
        y[i] = x[i]
        g[i] = (fp - fm) / (2 * h)
    return g


def _lbfgs_fd(f, x0: np.ndarray, max_iters: int) -> tuple[float, np.ndarray]:
    r = optimize.minimize(lambda x: (f(x), _fd_grad(f, x)), x0, jac=True, method="L-BFGS-B",
                          options={"maxiter": max_iters, "ftol": 1e-13, "gtol": 1e-8})
    return float(r.fun), r.x


def _polish(f, x: np.ndarray, fx: float) -> tuple[float, np.ndarray]:
    r = optimize.minimize(f, x, method="Nelder-Mead",
                          options={"maxiter": 40 * x.size, "xatol": 1e-10, "fatol": 1e-13, "adaptive": True})
    return (float(r.fun), r.x) if r.fun < fx else (fx, x)


def _multistart_min(make_objective, seeds: list, n_polish: int = 3, max_iters: int = 300):
    """Screen every seed, descend from the ``n_polish`` best plus all random seeds, polish the winner.

    ``make_objective(seed)`` returns ``(f, size, decode)``; ``f`` is minimized
    from zero parameters and ``decode(x)`` maps parameters to the measurement.
    Returns ``(best_value, decoded, per_start_values)``.
    """
    built = [make_objective(sd) for sd, _ in seeds]
    screen = [f(np.zeros(size)) for f, size, _ in built]
    fixed = [i for i, (_, kind) in enumerate(seeds) if kind == "fixed"]
    chosen = sorted(fixed, key=lambda i: screen[i])[:n_polish]
    chosen += [i for i, (_, kind) in enumerate(seeds) if kind == "random"]
    results = []
    for i in chosen:
        f, size, decode = built[i]
        fx, x = _lbfgs_fd(f, np.zeros(size), max_iters)
        if screen[i] < fx:
            fx, x = screen[i], np.zeros(size)
        results.append((fx, x, i))
    fx, x, i = min(results, key=lambda r: r[0])
    f, _, decode = built[i]
    fx, x = _polish(f, x, fx)
    per_start = [r[0] for r in results]
    per_start[[r[2] for r in results].index(i)] = fx
    return fx, decode(x), per_start


@dataclass
class MeasurementResult:
    value: float
    measurements: tuple[MeasurementEnsemble, ...]
    per_start_values: list[float] = field(default_factory=list)


def _seed_isometries(rho_side: np.ndarray, d: int) -> list[np.ndarray]:
    seeds = [_eigbasis_isometry(rho_side)]
    if d == 2:
        seeds += _pauli_bases()
    else:
        w = np.zeros((d * d, d), dtype=complex)
        w[:d] = np.eye(d)
        seeds.append(w)
    return seeds


def classical_mutual_info_result(s: BipartiteState, n_starts: int = 4, seed: int = 0) -> MeasurementResult:
    """Best classical mutual information over pairs of local rank-1 POVMs with ``d²`` outcomes.

    Seeds: eigenbases of the marginals, matched Pauli bases (qubits), every
    mismatched Pauli pair, then ``n_starts`` Haar-random measurement pairs.
    """
    da, db = s.dims
    na, nb = da * da, db * db
    seeds_a = _seed_isometries(s.rho_a(), da)
    seeds_b = _seed_isometries(s.rho_b(), db)
    pairs = [((wa, wb), "fixed") for wa, wb in zip(seeds_a, seeds_b)]
    if da == 2 and db == 2:
        pauli = _pauli_bases()
        pairs += [((pauli[i], pauli[j]), "fixed") for i in range(3) for j in range(3) if i != j]
    for i in range(n_starts):
        rng = start_rng(seed, i)
        pairs.append(((haar_unitary(na, rng)[:, :da], haar_unitary(nb, rng)[:, :db]), "random"))

    def make(pair):
        wa0, wb0 = pair
        ga = IsometryGenerator(na, da, _base_for(wa0))
        gb = IsometryGenerator(nb, db, _base_for(wb0))

        def neg(x):
            return -mutual_information(_joint_probs(s.rho, ga.isometry(x[:ga.size]), gb.isometry(x[ga.size:])))

        return neg, ga.size + gb.size, lambda x: (ga.isometry(x[:ga.size]), gb.isometry(x[ga.size:]))

    fx, (wa, wb), per_start = _multistart_min(make, pairs)
    return MeasurementResult(max(-fx, 0.0),
                             (MeasurementEnsemble.from_isometry(wa), MeasurementEnsemble.from_isometry(wb)),
                             [-v for v in per_start])


def classical_mutual_info(s: BipartiteState, n_starts: int = 4, seed: int = 0) -> float:
    """Lower estimate of the classical mutual information obtainable by local measurements."""
    return classical_mutual_info_result(s, n_starts, seed).value


def _steered(rho: np.ndarray, w: np.ndarray, d_meas: int, d_other: int, side: str):
    """Unnormalized conditional states ``τ_j`` on the unmeasured side, shape (n, d_other, d_other)."""
    n = w.shape[0]
    if side == "A":
        t = rho.reshape(d_meas, d_other, d_meas, d_other)
        tau = np.einsum("ja,axby,jb->jxy", w, t, w.conj())
    else:
        t = rho.reshape(d_other, d_meas, d_other, d_meas)
        tau = np.einsum("ja,xayb,jb->jxy", w, t, w.conj())
    return tau.reshape(n, d_other, d_other)


def holevo_of_steering(s: BipartiteState, w: np.ndarray, side: str = "A") -> float:
    """Holevo quantity of the ensemble steered on the other side by measurement ``w``."""
    if side == "A":
        d_meas, d_other, rho_other = s.d_a, s.d_b, s.rho_b()
    else:
        d_meas, d_other, rho_other = s.d_b, s.d_a, s.rho_a()
    tau = _steered(s.rho, w, d_meas, d_other, side)
    avg = 0.0
    for t in tau:
        p = np.trace(t).real
        if p <= 1e-300:
            continue
        lam = np.linalg.eigvalsh(0.5 * (t + t.conj().T)) / p
        avg += p * qmat.entropy_of_probs(np.clip(lam, 0.0, None))
    total = qmat.entropy_of_probs(np.clip(np.linalg.eigvalsh(rho_other), 0.0, None))
    return max(total - avg, 0.0)


def induced_holevo_result(s: BipartiteState, side: str = "A", n_starts: int = 4, seed: int = 0) -> MeasurementResult:
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    d = s.d_a if side == "A" else s.d_b
    n = d * d
    seeds = [(w, "fixed") for w in _seed_isometries(s.rho_a() if side == "A" else s.rho_b(), d)]
    seeds += [(haar_unitary(n, start_rng(seed, i))[:, :d], "random") for i in range(n_starts)]

    def make(w0):
        gen = IsometryGenerator(n, d, _base_for(w0))

        def neg(x):
            return -holevo_of_steering(s, gen.isometry(x), side)

        return neg, gen.size, gen.isometry

    fx, w, per_start = _multistart_min(make, seeds)
    return MeasurementResult(max(-fx, 0.0), (MeasurementEnsemble.from_isometry(w),),
                             [-v for v in per_start])


def induced_holevo(s: BipartiteState, side: str = "A", n_starts: int = 4, seed: int = 0) -> float:
    """Lower estimate of ``C_A`` (measure on A, ensemble on B) or ``C_B``."""
    return induced_holevo_result(s, side, n_starts, seed).value


def steered_ensemble(s: BipartiteState, m: MeasurementEnsemble, side: str = "A"):
    """Probabilities and normalized conditional states produced by measuring ``side``."""
    d_meas, d_other = (s.d_a, s.d_b) if side == "A" else (s.d_b, s.d_a)
    w = m.rows if m.rows is not None else np.array([_row_of(e) for e in m.povm_elements])
    tau = _steered(s.rho, w, d_meas, d_other, side)
    probs = np.array([np.trace(t).real for t in tau])
    states_ = [t / p if p > 1e-300 else t for t, p in zip(tau, probs)]
    return probs, states_


def _row_of(e: np.ndarray) -> np.ndarray:
    # rank-1 element |v⟩⟨v| -> row ⟨v|
    vals, vecs = np.linalg.eigh(0.5 * (e + e.conj().T))
    v = vecs[:, -1] * np.sqrt(max(vals[-1], 0.0))
    return v.conj()


# --- the report -------------------------------------------------------------

@dataclass
class BoundsReport:
    ef: float | None
    iq_half: float
    ic_lower: float
    c_a: float
    c_b: float
    marginal_upper: float
    ep_estimate: float | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def ep_lower(self) -> float:
        vals = [self.iq_half, self.ic_lower, self.c_a, self.c_b]
        if self.ef is not None:
            vals.append(self.ef)
        return max(vals)

    def pinched(self, tol: float = 1e-3) -> bool:
        """True when the best lower bound meets the marginal-entropy upper bound."""
        return self.marginal_upper - self.ep_lower <= tol

    def as_dict(self) -> dict:
        return {
            "ef": self.ef, "iq_half": self.iq_half, "ic_lower": self.ic_lower,
            "c_a": self.c_a, "c_b": self.c_b, "marginal_upper": self.marginal_upper,
            "ep_estimate": self.ep_estimate, "ep_lower": self.ep_lower,
            "pinched": self.pinched(), "flags": list(self.flags),
        }


def bounds_report(s: BipartiteState, ep=None, n_starts: int = 4, seed: int = 0,
                  tol_lower: float = 1e-4, tol_upper: float = 1e-6) -> BoundsReport:
    """Collect single-copy bounds for ``s`` and check their ordering against ``ep``.

    ``ep`` may be an :class:`~entpur.optimizer.EpEstimate`, a float or None.
    Ordering violations are recorded in ``flags`` rather than raised.
    """
    ef = ef_two_qubit(s) if s.dims == (2, 2) else None
    rep = BoundsReport(
        ef=ef,
        iq_half=0.5 * quantum_mutual_info(s),
        ic_lower=classical_mutual_info(s, n_starts, seed),
        c_a=induced_holevo(s, "A", n_starts, seed),
        c_b=induced_holevo(s, "B", n_starts, seed),
        marginal_upper=marginal_entropy_upper(s),
        ep_estimate=None if ep is None else float(getattr(ep, "value", ep)),
    )
    for name in ("iq_half", "ic_lower", "c_a", "c_b", "marginal_upper"):
        if getattr(rep, name) < -1e-9:
            rep.flags.append(f"{name} < 0")
    if rep.ic_lower > 2 * rep.iq_half + 1e-6:
        rep.flags.append("ic_lower > iq")
    if rep.ep_lower > rep.marginal_upper + tol_lower:
        rep.flags.append("lower bound > marginal_upper")
    if rep.ep_estimate is not None:
        if rep.ep_estimate > rep.marginal_upper + tol_upper:
            rep.flags.append("ep_estimate > marginal_upper")
        if rep.ef is not None and rep.ef > rep.ep_estimate + tol_lower:
            rep.flags.append("ef > ep_estimate")
        if rep.iq_half > rep.ep_estimate + tol_lower:
            rep.flags.append("iq_half > ep_estimate")
    return rep
