"""Multi-start minimization of purification entanglement.

The standard purification ``ψ_s`` is mapped into an ``A'(d_ap) ⊗ B'(d_bp)``
ancilla register by an isometry ``V``; the objective is the entanglement of
``(I_AB ⊗ V)|ψ_s⟩`` across ``AA'|BB'``. Every value found is the entanglement
of an actual purification, so every result is an upper estimate of ``E_p``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import optimize

from .purification import PurificationVector, from_ancilla_tensor, standard_purification
from .states import BipartiteState
from .unitary import IsometryGenerator, haar_unitary, start_rng

log = logging.getLogger(__name__)

_INV_LN2 = 1.0 / math.log(2.0)
RANK_TOL = 1e-12


class AncillaCapError(ValueError):
    """Ancilla dimensions outside the range where the minimum is known to be attained."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings.

    ``d_ap`` and ``d_bp`` are the ancilla dimensions of ``A'`` and ``B'``.
    ``gradient`` is ``"analytic"`` or ``"fd"`` (central differences with step
    ``fd_step``).
    """

    d_ap: int = 4
    d_bp: int = 4
    n_starts: int = 50
    max_iters: int = 2000
    obj_tol: float = 1e-8
    seed: int = 0
    gradient: str = "analytic"
    fd_step: float = 1e-5
    probes: int = 8

    def __post_init__(self):
        if self.d_ap < 1 or self.d_bp < 1:
            raise ValueError(f"ancilla dimensions must be positive, got ({self.d_ap}, {self.d_bp})")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if not self.obj_tol > 0:
            raise ValueError("obj_tol must be positive")
        if self.gradient not in ("analytic", "fd"):
            raise ValueError(f"unknown gradient mode {self.gradient!r}")

    def check_caps(self, d_ab: int) -> None:
        if self.d_ap > d_ab or self.d_bp > d_ab ** 2:
            raise AncillaCapError(
                f"ancilla dims ({self.d_ap}, {self.d_bp}) exceed the caps "
                f"d_A' <= {d_ab}, d_B' <= {d_ab ** 2}")

    def with_dims(self, d_ap: int, d_bp: int) -> "OptimizerConfig":
        return replace(self, d_ap=int(d_ap), d_bp=int(d_bp))


@dataclass
class StartResult:
    value: float
    params: np.ndarray
    isometry: np.ndarray
    trace: list[float]
    converged: bool
    n_iter: int
    method: str


@dataclass
class EpEstimate:
    value: float
    best_params: np.ndarray
    per_start_values: list[float]
    dims_used: tuple[int, int]
    converged: bool
    best_start: int = 0
    best_isometry: np.ndarray | None = field(default=None, repr=False)
    best_purification: PurificationVector | None = field(default=None, repr=False)
    traces: list[list[float]] = field(default_factory=list, repr=False)


class PurificationProblem:
    """Objective for one state and one ancilla configuration.

    Parameters
    ----------
    s : BipartiteState
    d_ap, d_bp : int
        Ancilla dimensions. The source register is the padded ``B'`` of the
        standard purification (size ``d_A d_B``); if the target register is
        smaller, the source is cut down to the support of ``ρ``.
    """

    def __init__(self, s: BipartiteState, d_ap: int, d_bp: int):
        self.state = s
        self.d_ap, self.d_bp = int(d_ap), int(d_bp)
        self.d_anc = self.d_ap * self.d_bp
        t = standard_purification(s).amplitudes[:, 0, :, :]  # (a, b, k)
        k = s.d_ab
        if self.d_anc < k:
            k = max(s.rank(RANK_TOL), 1)
            if self.d_anc < k:
                raise ValueError(
                    f"an A'B' register of size {self.d_anc} cannot purify a rank-{k} state")
            t = t[:, :, :k]
            t = t / np.linalg.norm(t)
        self.n_in = k
        self.t = np.ascontiguousarray(t)
        self._t_conj = np.conj(self.t)

    def generator(self, base: np.ndarray | None = None) -> IsometryGenerator:
        return IsometryGenerator(self.d_anc, self.n_in, base)

    def _cut(self, v: np.ndarray) -> np.ndarray:
        a, b = self.state.d_a, self.state.d_b
        psi = np.einsum("abk,jk->abj", self.t, v).reshape(a, b, self.d_ap, self.d_bp)
        return psi.transpose(0, 2, 1, 3).reshape(a * self.d_ap, b * self.d_bp)

    def entanglement(self, v: np.ndarray) -> float:
        s = np.linalg.svd(self._cut(v), compute_uv=False)
        p = s * s
        p = p[p > 0]
        return float(max(-np.sum(p * np.log2(p)), 0.0))

    def entanglement_and_grad(self, v: np.ndarray) -> tuple[float, np.ndarray]:
        """Entropy of the cut and ``G`` with ``dS = Re Tr(G† dV)``.

        For ``S = Σ f(s_k)``, ``f(s) = -s² log2 s²``, the gradient with respect
        to the cut matrix is ``U diag(f'(s)) W†``; ``f'(0) = 0``, so zero and
        repeated singular values are harmless.
        """
        a, b = self.state.d_a, self.state.d_b
        m = self._cut(v)
        u, s, wh = np.linalg.svd(m, full_matrices=False)
        p = s * s
        pos = p > 0
        logp = np.zeros_like(p)
        logp[pos] = np.log2(p[pos])
        value = float(max(-np.sum(p[pos] * logp[pos]), 0.0))
        fprime = np.where(pos, -2.0 * s * (logp + _INV_LN2), 0.0)
        g_m = (u * fprime) @ wh
        g_psi = g_m.reshape(a, self.d_ap, b, self.d_bp).transpose(0, 2, 1, 3).reshape(a, b, self.d_anc)
        g_v = np.einsum("abj,abk->jk", g_psi, self._t_conj)
        return value, g_v

    def purification(self, v: np.ndarray) -> PurificationVector:
        t = np.einsum("abk,jk->abj", self.t, v)
        return from_ancilla_tensor(t / np.linalg.norm(t), self.d_ap, self.d_bp)


def _fd_gradient(f, x: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(x)
    xp = x.copy()
    for i in range(x.size):
        xp[i] = x[i] + h
        fp = f(xp)
        xp[i] = x[i] - h
        fm = f(xp)
        xp[i] = x[i]
        g[i] = (fp - fm) / (2.0 * h)
    return g


def _problem_for(s: BipartiteState, cfg: OptimizerConfig) -> PurificationProblem:
    cfg.check_caps(s.d_ab)
    return PurificationProblem(s, cfg.d_ap, cfg.d_bp)


def objective(params, s: BipartiteState, cfg: OptimizerConfig, base: np.ndarray | None = None) -> float:
    """Entanglement of ``(I ⊗ W exp(iH(params)))|ψ_s⟩`` in the configured ancilla space.

    With ``base=None`` and zero parameters the isometry is the plain embedding
    of the ``B'`` register of ``ψ_s`` into the flat ``A'B'`` index, which is the
    standard purification itself whenever ``d_bp >= d_A d_B``.
    """
    prob = _problem_for(s, cfg)
    gen = prob.generator(base)
    params = np.asarray(params, dtype=float)
    if params.shape != (gen.size,):
        raise ValueError(f"expected {gen.size} parameters for a {gen.rows}x{gen.cols} isometry, "
                         f"got shape {params.shape}")
    return prob.entanglement(gen.isometry(params))


def objective_and_grad(params, prob: PurificationProblem, gen: IsometryGenerator):
    v, pullback = gen.isometry_and_pullback(params)
    value, g_v = prob.entanglement_and_grad(v)
    return value, pullback(g_v)


def _start_base(prob: PurificationProblem, start_index: int, seed: int) -> np.ndarray | None:
    """Base unitary for a start: identity, the A'-side embedding, then Haar-random."""
    d, k = prob.d_anc, prob.n_in
    if start_index == 0:
        return None
    fixed = 1
    if prob.d_ap >= k and prob.d_bp > 1:
        if start_index == 1:
            # column k -> |k>_A' |0>_B'
            perm = [i * prob.d_bp for i in range(k)]
            perm += [j for j in range(d) if j not in set(perm)]
            w = np.zeros((d, d), dtype=complex)
            w[perm, np.arange(d)] = 1.0
            return w
        fixed = 2
    return haar_unitary(d, start_rng(seed, start_index - fixed + 1))


def _run_lbfgs(fun_grad, x0: np.ndarray, cfg: OptimizerConfig, trace: list[float]):
    def cb(intermediate_result):
        trace.append(float(intermediate_result.fun))

    res = optimize.minimize(
        fun_grad, x0, jac=True, method="L-BFGS-B", callback=cb,
        options={"maxiter": cfg.max_iters, "ftol": cfg.obj_tol * 1e-2, "gtol": 1e-9,
                 "maxcor": 20})
    return res


def _minimize_problem(prob: PurificationProblem, cfg: OptimizerConfig, start_index: int,
                      base: np.ndarray | None = None, x0: np.ndarray | None = None) -> StartResult:
    if base is None and x0 is None:
        base = _start_base(prob, start_index, cfg.seed)
    gen = prob.generator(base)

    if cfg.gradient == "analytic":
        def fun_grad(x):
            return objective_and_grad(x, prob, gen)
    else:
        def f(x):
            return prob.entanglement(gen.isometry(x))

        def fun_grad(x):
            return f(x), _fd_gradient(f, x, cfg.fd_step)

    def f_only(x):
        return prob.entanglement(gen.isometry(x))

    x = np.zeros(gen.size) if x0 is None else np.asarray(x0, dtype=float).copy()
    f0 = f_only(x)
    trace = [f0]
    res = _run_lbfgs(fun_grad, x, cfg, trace)
    x = res.x
    fx = f_only(x)
    n_iter = int(res.nit)
    method = "lbfgs"
    converged = bool(res.success)

    # stagnation check: L-BFGS can stall on kinks where reduced-state eigenvalues cross
    if cfg.probes > 0 and fx > cfg.obj_tol:
        rng = start_rng(cfg.seed, 10_000 + start_index)
        best_probe, best_val = None, fx
        for _ in range(cfg.probes):
            y = x + 1e-3 * rng.standard_normal(x.size)
            fy = f_only(y)
            if fy < best_val - cfg.obj_tol:
                best_probe, best_val = y, fy
        if best_probe is not None:
            log.debug("start %d: probe improved %.3e -> %.3e, switching to simplex",
                      start_index, fx, best_val)
            trace.append(best_val)
            nm_budget = max(cfg.max_iters, 20 * gen.size)
            nm = optimize.minimize(f_only, best_probe, method="Nelder-Mead",
                                   callback=lambda xk: trace.append(f_only(xk)),
                                   options={"maxiter": nm_budget, "xatol": 1e-9,
                                            "fatol": cfg.obj_tol * 1e-2, "adaptive": True})
            y, fy = nm.x, float(nm.fun)
            res2 = _run_lbfgs(fun_grad, y, cfg, trace)
            if float(res2.fun) <= fy:
                y, fy = res2.x, float(res2.fun)
            if fy < fx:
                x, fx = y, fy
                method = "lbfgs+simplex"
                converged = bool(res2.success)
            n_iter += int(nm.nit) + int(res2.nit)

    if not converged and len(trace) >= 2 and abs(trace[-2] - trace[-1]) <= cfg.obj_tol:
        converged = True
    # keep the trace non-increasing: entries are accepted iterates, the fallback
    # only commits when it improves
    mono = list(np.minimum.accumulate(trace))
    v = gen.isometry(x)
    return StartResult(value=float(max(fx, 0.0)), params=x, isometry=v, trace=mono,
                       converged=converged, n_iter=n_iter, method=method)


def minimize_single_start(s: BipartiteState, cfg: OptimizerConfig, start_seed: int = 0) -> tuple[float, np.ndarray]:
    """One local descent from start ``start_seed`` (0 is the plain embedding)."""
    prob = _problem_for(s, cfg)
    r = _minimize_problem(prob, cfg, int(start_seed))
    return r.value, r.params


def _estimate_from_starts(prob: PurificationProblem, cfg: OptimizerConfig,
                          extra: Sequence[np.ndarray] = ()) -> EpEstimate:
    results: list[StartResult] = []
    for i in range(cfg.n_starts):
        results.append(_minimize_problem(prob, cfg, i))
    for j, v0 in enumerate(extra):
        # warm start from a given isometry: use it (completed to a unitary) as the base
        results.append(_minimize_problem(prob, cfg, cfg.n_starts + j, base=_complete_unitary(v0)))
    values = [r.value for r in results]
    best = int(np.argmin(values))
    r = results[best]
    return EpEstimate(
        value=values[best],
        best_params=r.params,
        per_start_values=values,
        dims_used=(prob.d_ap, prob.d_bp),
        converged=any(x.converged for x in results),
        best_start=best,
        best_isometry=r.isometry,
        best_purification=prob.purification(r.isometry),
        traces=[x.trace for x in results],
    )


def _complete_unitary(v: np.ndarray) -> np.ndarray:
    """Extend an isometry to a unitary whose leading columns are ``v``."""
    v = np.asarray(v, dtype=complex)
    d, k = v.shape
    if k == d:
        return v
    q, _ = np.linalg.qr(np.hstack([v, np.eye(d, dtype=complex)]))
    rest = q[:, k:d]
    # project out v explicitly for numerical safety
    rest = rest - v @ (v.conj().T @ rest)
    rest, _ = np.linalg.qr(rest)
    return np.hstack([v, rest])


def estimate_ep(s: BipartiteState, cfg: OptimizerConfig | None = None) -> EpEstimate:
    """Best purification entanglement over ``cfg.n_starts`` starts in the configured dims.

    Start 0 is the plain embedding of ``ψ_s``; when ``d_A' >= d_A d_B`` start 1
    puts the whole purifying register on ``A'``. The remaining starts use
    Haar-random base unitaries drawn from ``(seed, start index)`` streams.
    """
    cfg = cfg or OptimizerConfig(d_ap=s.d_ab, d_bp=s.d_ab)
    prob = _problem_for(s, cfg)
    return _estimate_from_starts(prob, cfg)


def embed_isometry(v: np.ndarray, dims_from: tuple[int, int], dims_to: tuple[int, int]) -> np.ndarray:
    """Re-express an isometry into ``A'(a)⊗B'(b)`` as one into a larger ``A'⊗B'``
    by zero-padding each ancilla separately (entanglement is unchanged)."""
    (a0, b0), (a1, b1) = dims_from, dims_to
    if a1 < a0 or b1 < b0:
        raise ValueError(f"cannot embed dims {dims_from} into {dims_to}")
    k = v.shape[1]
    out = np.zeros((a1, b1, k), dtype=complex)
    out[:a0, :b0, :] = v.reshape(a0, b0, k)
    return out.reshape(a1 * b1, k)


@dataclass
class SweepResult:
    estimates: list[EpEstimate]
    best: EpEstimate

    @property
    def value(self) -> float:
        return self.best.value


def dimension_sweep(s: BipartiteState, dims: Sequence[tuple[int, int]], cfg: OptimizerConfig | None = None,
                    nested: bool = True) -> SweepResult:
    """Run :func:`estimate_ep` for each ``(d_ap, d_bp)`` pair.

    With ``nested=True`` the best isometry of each smaller configuration that
    fits inside a later one is added to that later run as one extra warm start,
    so a larger register never reports a worse value than one it contains.
    """
    cfg = cfg or OptimizerConfig()
    for d_ap, d_bp in dims:
        cfg.with_dims(d_ap, d_bp).check_caps(s.d_ab)
    estimates: list[EpEstimate] = []
    for d_ap, d_bp in dims:
        c = cfg.with_dims(d_ap, d_bp)
        prob = PurificationProblem(s, d_ap, d_bp)
        extra = []
        if nested:
            for prev in estimates:
                pa, pb = prev.dims_used
                if (pa, pb) != (d_ap, d_bp) and pa <= d_ap and pb <= d_bp \
                        and prev.best_isometry.shape[1] == prob.n_in:
                    extra.append(embed_isometry(prev.best_isometry, (pa, pb), (d_ap, d_bp)))
        estimates.append(_estimate_from_starts(prob, c, extra))
    best = min(estimates, key=lambda e: e.value)
    return SweepResult(estimates, best)


def tensor_power_estimate(s: BipartiteState, n: int = 2, cfg: OptimizerConfig | None = None) -> float:
    """``E_p(ρ^{⊗n}) / n`` upper estimate, limited to total dimension 16."""
    if s.d_ab ** n > 16:
        raise ValueError("tensor-power probe is limited to total dimension 16")
    rho = s.rho
    # reorder (A1 B1 A2 B2) -> (A1 A2 B1 B2)
    big = rho
    for _ in range(n - 1):
        big = np.kron(big, rho)
    dims = [s.d_a, s.d_b] * n
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    t = big.reshape(dims + dims)
    t = t.transpose(perm + [p + 2 * n for p in perm])
    d = s.d_ab ** n
    sn = BipartiteState(t.reshape(d, d), s.d_a ** n, s.d_b ** n)
    cfg = cfg or OptimizerConfig(d_ap=s.d_ab, d_bp=s.d_ab, n_starts=10)
    return estimate_ep(sn, cfg).value / n
