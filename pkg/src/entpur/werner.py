"""Werner-state curves: the dimension-resolved E_p sweep and its companions.

Each grid point gets E_p upper estimates for several ancilla sizes together
with the closed-form lower bounds (entanglement of formation, induced Holevo
information, half the mutual information) and the two-qubit-ancilla (2x2) curves.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from . import bounds, qmat
from .optimizer import OptimizerConfig, dimension_sweep
from .purification import ancilla_ranks, bell_ansatz_purification, purification_entanglement
from .states import werner

SWEEP_DIMS = ((2, 2), (2, 3), (4, 4))
REGIME2_RANGE = (0.005, 0.25)
REGIME_MARKS = (0.005, 0.25, 0.69)
TIE_TOL = 1e-6


class SweepInvariantError(RuntimeError):
    pass


def _regime2_x(e: float) -> float:
    return (1.0 + 2.0 * e - 2.0 * math.sqrt(3.0) * math.sqrt(e * (1.0 - e))) / 12.0


def werner_regime2_analytic(e: float) -> float:
    """``-x log x - (1-x) log((1-x)/3)`` with ``x = (1 + 2e - 2√3 √(e(1-e)))/12``, as published.

    Kept verbatim for comparison. It does not match the entanglement of the
    Bell-type 2x2 purification (it gives log2 3 at e = 1/4, where that
    purification is a product across the cut); see
    :func:`werner_regime2_closed_form`.
    """
    e = float(e)
    lo, hi = REGIME2_RANGE
    if not lo <= e <= hi:
        raise ValueError(f"closed form is stated for {lo} <= e <= {hi}, got {e}")
    x = max(_regime2_x(e), 0.0)
    return qmat.entropy_of_probs([x, (1 - x) / 3, (1 - x) / 3, (1 - x) / 3])


def werner_regime2_closed_form(e: float) -> float:
    """Entropy of the Schmidt spectrum ``(1 - 3x, x, x, x)`` of the Bell-type 2x2 purification,
    with the same ``x`` as the published closed form."""
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"Werner weight e={e} outside [0, 1]")
    x = min(max(_regime2_x(e), 0.0), 1.0 / 3.0)
    return qmat.entropy_of_probs([1 - 3 * x, x, x, x])


def werner_regime2_ansatz(e: float) -> float:
    """Entanglement of ``√e |Ψ0⟩|Ψ0⟩ + √((1-e)/3) Σ_i |Ψi⟩|Ψi⟩`` (real Bell vectors)."""
    q = (1.0 - float(e)) / 3.0
    return purification_entanglement(bell_ansatz_purification([e, q, q, q]))


@dataclass
class SweepRow:
    e: float
    ep_2x2: float
    ep_4x4: float
    ep_best: float
    regime2_as_printed: float | None
    regime2_ansatz: float | None
    ef: float
    c_a: float
    iq_half: float
    upper: float
    dims_best: tuple[int, int]

    def check(self, tol_lower: float = 1e-4, tol_upper: float = 1e-6) -> None:
        if self.ef > self.ep_best + tol_lower:
            raise SweepInvariantError(f"e={self.e}: ef <= ep_best + {tol_lower} violated "
                                      f"({self.ef:.9g} > {self.ep_best:.9g})")
        if self.iq_half > self.ep_best + tol_lower:
            raise SweepInvariantError(f"e={self.e}: iq_half <= ep_best + {tol_lower} violated "
                                      f"({self.iq_half:.9g} > {self.ep_best:.9g})")
        if self.ep_best > self.upper + tol_upper:
            raise SweepInvariantError(f"e={self.e}: ep_best <= upper + {tol_upper} violated "
                                      f"({self.ep_best:.9g} > {self.upper:.9g})")


FIELDS = tuple(f.name for f in fields(SweepRow))


def sweep_row(e: float, cfg: OptimizerConfig | None = None,
              dims: Sequence[tuple[int, int]] = SWEEP_DIMS, nested: bool = True) -> SweepRow:
    cfg = cfg or OptimizerConfig()
    s = werner(e)
    dims = list(dims)
    for needed in ((2, 2), (4, 4)):
        if needed not in dims:
            dims.append(needed)
    sweep = dimension_sweep(s, dims, cfg, nested=nested)
    by_dims = {est.dims_used: est for est in sweep.estimates}
    best_val = min(est.value for est in sweep.estimates)
    # among (near-)ties report the smallest ancilla sizes that realize the optimum
    cands = []
    for est in sweep.estimates:
        if est.value <= best_val + TIE_TOL:
            ra, rb = ancilla_ranks(est.best_purification)
            cands.append((ra * rb, ra, rb))
    _, ra, rb = min(cands)
    lo, hi = REGIME2_RANGE
    in_r2 = lo <= e <= hi
    return SweepRow(
        e=float(e),
        ep_2x2=by_dims[(2, 2)].value,
        ep_4x4=by_dims[(4, 4)].value,
        ep_best=best_val,
        regime2_as_printed=werner_regime2_analytic(e) if in_r2 else None,
        regime2_ansatz=werner_regime2_ansatz(e) if e <= hi else None,
        ef=bounds.ef_two_qubit(s),
        c_a=bounds.werner_CA(e),
        iq_half=0.5 * bounds.quantum_mutual_info(s),
        upper=bounds.marginal_entropy_upper(s),
        dims_best=(ra, rb),
    )


def default_grid(e_min: float = 0.0, e_max: float = 1.0, step: float = 0.01,
                 dense: bool = True, dense_step: float = 0.001, dense_width: float = 0.01) -> list[float]:
    """Uniform grid, optionally refined around the reported regime boundaries."""
    if not 0.0 <= e_min < e_max <= 1.0:
        raise ValueError(f"need 0 <= e_min < e_max <= 1, got {e_min}, {e_max}")
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((e_max - e_min) / step + 1e-9))
    pts = {round(e_min + i * step, 10) for i in range(n + 1)}
    pts.add(round(e_max, 10))
    if dense:
        for mark in REGIME_MARKS:
            a, b = max(e_min, mark - dense_width), min(e_max, mark + dense_width)
            if a > b:
                continue
            m = int(math.floor((b - a) / dense_step + 1e-9))
            pts.update(round(a + i * dense_step, 10) for i in range(m + 1))
    return sorted(p for p in pts if e_min - 1e-12 <= p <= e_max + 1e-12)


def _row_job(args):
    e, cfg, dims, nested = args
    return sweep_row(e, cfg, dims, nested)


def werner_sweep(grid: Iterable[float], cfg: OptimizerConfig | None = None,
                 dims: Sequence[tuple[int, int]] = SWEEP_DIMS, nested: bool = True,
                 jobs: int = 1, check: bool = True) -> list[SweepRow]:
    """Rows in grid order. ``jobs > 1`` spreads grid points over processes."""
    cfg = cfg or OptimizerConfig()
    grid = list(grid)
    work = [(e, cfg, tuple(dims), nested) for e in grid]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_job, work))
    else:
        rows = [_row_job(w) for w in work]
    if check:
        for r in rows:
            r.check()
    return rows


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, tuple):
        return "x".join(str(int(v)) for v in x)
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return format(x, "#.9g")


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(FIELDS)]
    for r in rows:
        d = asdict(r)
        d["dims_best"] = r.dims_best
        lines.append(",".join(format_value(d[name]) for name in FIELDS))
    return "\n".join(lines) + "\n"


def detect_regimes(rows: Sequence[SweepRow]) -> list[tuple[float, float, tuple[int, int]]]:
    """Maximal runs of consecutive grid points sharing ``dims_best``."""
    out: list[tuple[float, float, tuple[int, int]]] = []
    for r in rows:
        if out and out[-1][2] == r.dims_best:
            out[-1] = (out[-1][0], r.e, r.dims_best)
        else:
            out.append((r.e, r.e, r.dims_best))
    return out


@dataclass
class Regime2AuditRow:
    e: float
    numeric: float
    ansatz: float
    closed_form: float
    as_printed: float
    numeric_vs_ansatz: float
    printed_discrepancy: float

    @property
    def printed_flagged(self) -> bool:
        return self.printed_discrepancy > 2e-3


def regime2_audit(e_values: Iterable[float] = (0.05, 0.10, 0.15, 0.20),
                  cfg: OptimizerConfig | None = None) -> list[Regime2AuditRow]:
    """Compare the (2,2) optimizer against the explicit Bell-type 2x2 purification and the published closed form."""
    cfg = (cfg or OptimizerConfig()).with_dims(2, 2)
    out = []
    for e in e_values:
        numeric = dimension_sweep(werner(e), [(2, 2)], cfg).value
        ansatz = werner_regime2_ansatz(e)
        printed = werner_regime2_analytic(e)
        out.append(Regime2AuditRow(
            e=float(e), numeric=numeric, ansatz=ansatz, closed_form=werner_regime2_closed_form(e),
            as_printed=printed, numeric_vs_ansatz=abs(numeric - ansatz),
            printed_discrepancy=abs(printed - ansatz)))
    return out


def audit_to_csv(rows: Sequence[Regime2AuditRow]) -> str:
    names = [f.name for f in fields(Regime2AuditRow)] + ["printed_flagged"]
    lines = [",".join(names)]
    for r in rows:
        vals = [format_value(getattr(r, n)) for n in names[:-1]] + [str(r.printed_flagged).lower()]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
