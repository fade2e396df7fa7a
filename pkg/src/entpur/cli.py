"""Command-line front end.

Commands: ``ep``, ``werner-sweep``, ``bounds``, ``channel``, ``builtin``.
Machine-readable output is CSV (reports) or JSON (state files), written to
``--out`` or stdout; human-readable summaries go to stderr.

Exit codes: 0 success, 1 invariant violation in computed output,
2 input/validation error, 3 configuration error (ancilla caps).
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path

from . import bounds, states, werner
from .fileio import StateFileError, dumps_state, read_state
from .optimizer import AncillaCapError, OptimizerConfig, estimate_ep
from .werner import format_value

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3
BUILTINS = ("bell", "werner", "bell-diagonal", "classical", "random")


class InputError(ValueError):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text)


def _kv_csv(pairs) -> str:
    buf = io.StringIO()
    buf.write("quantity,value\n")
    for k, v in pairs:
        if isinstance(v, bool):
            v = str(v).lower()
        elif isinstance(v, (int, str)):
            v = str(v)
        else:
            v = format_value(v)
        buf.write(f"{k},{v}\n")
    return buf.getvalue()


def _floats(vals, what):
    try:
        return [float(v) for v in vals]
    except ValueError:
        raise InputError(f"{what}: expected numbers, got {vals}") from None


def build_state(name: str, params, seed: int = 0, rank: int | None = None,
                dim: int | None = None) -> states.BipartiteState:
    """Construct a named builtin state from positional parameters."""
    params = list(params)
    if name == "bell":
        i = int(params[0]) if params else 0
        if len(params) > 1:
            raise InputError("bell takes one index 0..3")
        return states.pure_state(states.bell_state(i), 2, 2)
    if name == "werner":
        if len(params) != 1:
            raise InputError("werner takes one weight e")
        return states.werner(_floats(params, "werner")[0])
    if name == "bell-diagonal":
        if len(params) != 4:
            raise InputError("bell-diagonal takes four probabilities")
        return states.bell_diagonal(_floats(params, "bell-diagonal"))
    if name == "classical":
        if not params:
            raise InputError("classical takes a probability vector")
        return states.classical_correlated(_floats(params, "classical"), dim)
    if name == "random":
        if len(params) != 2:
            raise InputError("random takes d_a d_b")
        try:
            d_a, d_b = (int(p) for p in params)
        except ValueError:
            raise InputError(f"random: dimensions must be integers, got {params}") from None
        if d_a < 1 or d_b < 1:
            raise InputError("random: dimensions must be positive")
        return states.random_bipartite(d_a, d_b, rank, seed)
    raise InputError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def _load(args) -> states.BipartiteState:
    builtin = getattr(args, "builtin", None)
    if builtin:
        return build_state(builtin[0], builtin[1:], args.seed, getattr(args, "rank", None),
                           getattr(args, "dim", None))
    if not args.state:
        raise InputError("give a state file or --builtin NAME [PARAMS]")
    return read_state(args.state)


def _config(args, s) -> OptimizerConfig:
    d_ap = s.d_ab if args.dim_ap is None else args.dim_ap
    d_bp = s.d_ab if args.dim_bp is None else args.dim_bp
    cfg = OptimizerConfig(d_ap=d_ap, d_bp=d_bp, n_starts=args.starts, obj_tol=args.tol,
                          seed=args.seed, gradient=args.gradient)
    cfg.check_caps(s.d_ab)
    return cfg


def cmd_ep(args) -> int:
    s = _load(args)
    cfg = _config(args, s)
    est = estimate_ep(s, cfg)
    pairs = [("ep", est.value), ("d_ap", cfg.d_ap), ("d_bp", cfg.d_bp), ("n_starts", cfg.n_starts),
             ("seed", cfg.seed), ("converged", est.converged), ("best_start", est.best_start)]
    pairs += [(f"start_{i}", v) for i, v in enumerate(est.per_start_values)]
    _emit(_kv_csv(pairs), args.out)
    print(f"E_p <= {est.value:.9g} bits  (dims {cfg.d_ap}x{cfg.d_bp}, {cfg.n_starts} starts, "
          f"best start {est.best_start}, converged={est.converged})", file=sys.stderr)
    return EXIT_OK


def cmd_werner_sweep(args) -> int:
    if not (0.0 <= args.e_min < args.e_max <= 1.0):
        raise InputError(f"need 0 <= e-min < e-max <= 1, got {args.e_min}, {args.e_max}")
    if args.step <= 0:
        raise InputError("step must be positive")
    if args.jobs < 1:
        raise InputError("jobs must be at least 1")
    grid = werner.default_grid(args.e_min, args.e_max, args.step, dense=not args.no_dense)
    cfg = OptimizerConfig(n_starts=args.starts, seed=args.seed, obj_tol=args.tol, gradient=args.gradient)
    rows = werner.werner_sweep(grid, cfg, nested=not args.cold, jobs=args.jobs, check=False)
    for r in rows:
        r.check()
    _emit(werner.rows_to_csv(rows), args.out)
    if args.plot is not None:
        from .plotting import plot_sweep
        if args.plot is True:
            if args.out in (None, "-"):
                raise InputError("--plot without a path needs --out to place the figure")
            target = Path(args.out).with_suffix(".png")
        else:
            target = Path(args.plot)
        plot_sweep(rows, target)
        print(f"figure written to {target}", file=sys.stderr)
    for lo, hi, dims in werner.detect_regimes(rows):
        print(f"e in [{lo:g}, {hi:g}]: optimum reached with ancilla ranks {dims[0]}x{dims[1]}", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args) -> int:
    s = _load(args)
    ep = None
    if args.ep_starts > 0:
        cfg = OptimizerConfig(d_ap=s.d_ab, d_bp=s.d_ab, n_starts=args.ep_starts, seed=args.seed)
        ep = estimate_ep(s, cfg)
    rep = bounds.bounds_report(s, ep, n_starts=args.starts, seed=args.seed)
    d = rep.as_dict()
    pairs = [(k, d[k]) for k in ("ef", "iq_half", "ic_lower", "c_a", "c_b", "ep_lower",
                                  "marginal_upper", "ep_estimate", "pinched")]
    pairs.append(("flags", ";".join(rep.flags)))
    _emit(_kv_csv(pairs), args.out)
    summary = f"{rep.ep_lower:.6g} <= E_p <= {rep.marginal_upper:.6g}"
    if rep.ep_estimate is not None:
        summary += f"  (numerical upper estimate {rep.ep_estimate:.6g})"
    if rep.pinched():
        summary += "  -- bounds pinch E_p"
    print(summary, file=sys.stderr)
    for f in rep.flags:
        print(f"ordering violation: {f}", file=sys.stderr)
    return EXIT_INVARIANT if rep.flags else EXIT_OK


def cmd_channel(args) -> int:
    ch = states.PauliChannel(tuple(_floats(args.probs, "channel")))
    numeric = bounds.pauli_capacity(ch, grid=args.grid)
    closed = bounds.bell_diagonal_CA(ch.probs)
    _emit(_kv_csv([("numeric", numeric), ("closed_form", closed), ("difference", numeric - closed)]), args.out)
    return EXIT_OK


def cmd_builtin(args) -> int:
    s = build_state(args.name, args.params, args.seed, args.rank, args.dim)
    _emit(dumps_state(s), args.out)
    return EXIT_OK


def _common(p, out_help="output path (default stdout)"):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", default=None, help=out_help)


def _optimizer_flags(p, starts=50):
    p.add_argument("--starts", type=int, default=starts, help=f"optimizer starts (default {starts})")
    p.add_argument("--tol", type=float, default=1e-8, help="objective tolerance (default 1e-8)")
    p.add_argument("--gradient", choices=("analytic", "fd"), default="analytic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entpur", description="Entanglement of purification estimates and bounds.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ep", help="estimate E_p for a state file")
    p.add_argument("state", nargs="?")
    p.add_argument("--builtin", nargs="+", metavar="ARG", help="NAME [PARAMS] instead of a file")
    p.add_argument("--dimA'", "--dim-ap", dest="dim_ap", type=int, default=None)
    p.add_argument("--dimB'", "--dim-bp", dest="dim_bp", type=int, default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    _optimizer_flags(p)
    _common(p)
    p.set_defaults(func=cmd_ep)

    p = sub.add_parser("werner-sweep", help="E_p and bounds along the Werner family")
    p.add_argument("--e-min", type=float, default=0.0)
    p.add_argument("--e-max", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--no-dense", action="store_true", help="skip refinement near regime boundaries")
    p.add_argument("--cold", action="store_true", help="no warm starts between ancilla sizes")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plot", nargs="?", const=True, default=None, metavar="PATH",
                   help="also render a PNG (default: next to --out)")
    _optimizer_flags(p)
    _common(p, "CSV path (default stdout)")
    p.set_defaults(func=cmd_werner_sweep)

    p = sub.add_parser("bounds", help="lower and upper bounds on E_p")
    p.add_argument("state", nargs="?")
    p.add_argument("--builtin", nargs="+", metavar="ARG", help="NAME [PARAMS] instead of a file")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--starts", type=int, default=4, help="measurement-search starts (default 4)")
    p.add_argument("--ep-starts", type=int, default=20, help="E_p starts, 0 to skip (default 20)")
    _common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("channel", help="classical capacity of a Pauli channel")
    p.add_argument("probs", nargs=4, metavar="P")
    p.add_argument("--grid", type=int, default=128)
    _common(p)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("builtin", help="write a named state as a state file")
    p.add_argument("name", choices=BUILTINS)
    p.add_argument("params", nargs="*")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_builtin)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AncillaCapError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except werner.SweepInvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (StateFileError, InputError, ValueError, IndexError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
