"""Command-line front end.

Subcommands: check-dirs, decompose, verify, ridge-defect, pde verify, pde solve.
Every run ends by printing one JSON record (sorted keys) on stdout. Exit
codes: 0 success, 1 verification or validation failure, 2 input or format
error, 3 representability defect.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fileio
from .calculus import ExprFunction, Rect
from .decompose import (RECONSTRUCTION_RTOL, decompose, representability_defect)
from .errors import (CalculusError, DirectionError, ExprError, FormatError,
                     RepresentabilityError, RidgeSplitError)
from .geometry import normalized_cross, validate_directions
from .pde import (PlaneWaveOperator, corollary_check, plane_wave_solution,
                  verify_solution)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DEFECT = 0, 1, 2, 3
DEFAULT_DOMAIN = "-1,1,-1,1"
MIN_GRID = 33


class _Done(Exception):
    """Carries a finished record and exit code out of a subcommand."""

    def __init__(self, code: int, record: dict):
        self.code = code
        self.record = record


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _emit_record(record: dict) -> None:
    clean = {k: _finite(v) for k, v in record.items()}
    print(json.dumps(clean, sort_keys=True))


def _grid(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be an integer, got {value!r}") from None
    if n < MIN_GRID:
        raise argparse.ArgumentTypeError(f"grid must be at least {MIN_GRID}, got {n}")
    return n


def _positive(value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value!r}")
    return v


# -- input helpers ---------------------------------------------------------------

def _load_function(args, smoothness=None):
    """The single input source: --f expression or --samples grid file."""
    if args.f is not None and args.samples is not None:
        raise FormatError("give exactly one of --f and --samples")
    if args.samples is not None:
        return fileio.ingest_samples(args.samples, smoothness if smoothness is not None else 2)
    if args.f is None:
        raise FormatError("an input function is required (--f or --samples)")
    return ExprFunction.from_text(args.f, smoothness)


def _domain(args, F) -> Rect:
    if args.domain is not None:
        return fileio.parse_domain(args.domain)
    if F is not None and F.domain is not None:
        return F.domain
    return fileio.parse_domain(DEFAULT_DOMAIN)


def _default_deltas(domain: Rect, n: int) -> list[float]:
    # n shifts of this size always leave a nonempty inner rectangle
    return [min(domain.x1 - domain.x0, domain.y1 - domain.y0) / (n + 1)] * n


# -- subcommands ---------------------------------------------------------------

def cmd_check_dirs(args) -> int:
    pairs = fileio.parse_pairs(args.dirs, "directions")
    crosses = {}
    for i, j in itertools.combinations(range(len(pairs)), 2):
        a, b = pairs[i], pairs[j]
        zero = math.hypot(*a) == 0.0 or math.hypot(*b) == 0.0
        crosses[f"{i},{j}"] = 0.0 if zero else normalized_cross(a, b)
        print(f"pair ({i},{j}): normalized cross {crosses[f'{i},{j}']:.6e}")
    record = {"command": "check-dirs", "n": len(pairs), "pairwise_cross": crosses}
    try:
        validate_directions(pairs, args.tol_indep)
    except DirectionError as err:
        print(f"invalid: {err}")
        bad = list(getattr(err, "pair", ())) or [getattr(err, "index", None)]
        raise _Done(EXIT_FAIL, {**record, "status": "invalid", "error": str(err),
                                "offending": bad})
    print(f"valid: {len(pairs)} pairwise independent directions")
    raise _Done(EXIT_OK, {**record, "status": "valid"})


def cmd_decompose(args) -> int:
    ds = validate_directions(fileio.parse_pairs(args.dirs, "directions"))
    F = _load_function(args, args.smoothness)
    domain = _domain(args, F)
    method = args.method or ("numeric" if args.samples is not None else "symbolic")
    axis_pair = None
    if args.axis_pair is not None:
        vals = fileio.parse_floats(args.axis_pair, "axis pair", 2)
        axis_pair = (int(vals[0]), int(vals[1]))
    record = {"command": "decompose", "method": method, "n": len(ds),
              "grid_n": args.grid, "domain": list(domain)}
    try:
        dec = decompose(F, ds, domain, args.grid, method, axis_pair=axis_pair)
    except RepresentabilityError as err:
        deltas = _default_deltas(domain, len(ds))
        inc = representability_defect(F, ds, deltas, domain)
        print(f"not representable: {err}")
        print(f"iterated increment defect {inc:.6e} (deltas {deltas[0]:.6g})")
        raise _Done(EXIT_DEFECT, {**record, "status": "defect", "error": str(err),
                                  "defect_kind": err.kind, "defect": err.defect,
                                  "threshold": err.threshold, "stage": err.stage,
                                  "increment_defect": inc, "deltas": deltas})
    fileio.write_decomposition(args.out, dec)
    print(f"reconstruction_sup_error {dec.reconstruction_sup_error:.6e}")
    print(f"separation_defect {dec.separation_defect:.6e}")
    print(f"wrote {args.out}")
    record.update(status="ok", out=str(args.out),
                  reconstruction_sup_error=dec.reconstruction_sup_error,
                  separation_defect=dec.separation_defect)
    if args.emit_plot_data:
        plot_dir = args.plot_dir or f"{Path(args.out).with_suffix('')}_plot"
        written = fileio.write_plot_data(plot_dir, dec, F)
        print(f"wrote {len(written)} plot data files to {plot_dir}")
        record["plot_files"] = written
    raise _Done(EXIT_OK, record)


def cmd_verify(args) -> int:
    dec = fileio.read_decomposition(args.decomposition)
    if args.f is None and args.samples is None:
        if dec.source_expression is None:
            raise FormatError("decomposition has no source_expression; pass --f or --samples")
        args.f = dec.source_expression
    F = _load_function(args)
    X, Y = dec.domain.mesh(args.grid)
    err = float(np.max(np.abs(F(X, Y) - dec(X, Y))))
    tol = args.tol if args.tol is not None else RECONSTRUCTION_RTOL.get(dec.method, 1e-6)
    ok = err <= tol
    print(f"sup error {err:.6e} on a {args.grid}x{args.grid} grid (tol {tol:.1e}): "
          f"{'pass' if ok else 'FAIL'}")
    raise _Done(EXIT_OK if ok else EXIT_FAIL,
                {"command": "verify", "status": "pass" if ok else "fail",
                 "sup_error": err, "tol": tol, "grid_n": args.grid,
                 "stored_error": dec.reconstruction_sup_error})


def cmd_ridge_defect(args) -> int:
    ds = validate_directions(fileio.parse_pairs(args.dirs, "directions"))
    F = _load_function(args)
    domain = _domain(args, F)
    if args.deltas is not None:
        deltas = fileio.parse_floats(args.deltas, "deltas")
        if len(deltas) == 1:
            deltas = deltas * len(ds)
        if len(deltas) != len(ds):
            raise FormatError(f"{len(deltas)} deltas for {len(ds)} directions")
    else:
        deltas = _default_deltas(domain, len(ds))
    defect = representability_defect(F, ds, deltas, domain, args.grid)
    print(f"iterated increment defect {defect:.6e}")
    record = {"command": "ridge-defect", "defect": defect, "deltas": deltas,
              "grid_n": args.grid, "n": len(ds)}
    if args.tol is not None and defect > args.tol:
        print(f"exceeds {args.tol:.1e}: not a ridge sum along these directions")
        raise _Done(EXIT_DEFECT, {**record, "status": "defect", "tol": args.tol})
    raise _Done(EXIT_OK, {**record, "status": "ok"})


def cmd_pde_verify(args) -> int:
    op = PlaneWaveOperator(fileio.parse_pairs(args.factors, "factors"))
    u = ExprFunction.from_text(args.u)
    domain = _domain(args, u)
    record = {"command": "pde verify", "r": op.r, "tol": args.tol}
    if args.corollary:
        try:
            rep = corollary_check(op, u, domain, args.decompose_grid, args.tol,
                                  verify_n=args.grid)
        except RepresentabilityError as err:
            print(f"u is not a plane-wave sum for this operator: {err}")
            raise _Done(EXIT_DEFECT, {**record, "status": "defect", "error": str(err),
                                      "defect": err.defect, "defect_kind": err.kind})
        sol = rep.solution
        for note in rep.notes:
            print(f"note: {note}")
        record.update(mode="corollary",
                      reconstruction_sup_error=rep.decomposition.reconstruction_sup_error)
    else:
        sol = verify_solution(op, u, domain, args.grid, args.tol, args.method)
        record["mode"] = "direct"
    print(f"max residual {sol.max_residual:.6e} (threshold {sol.threshold:.3e}): "
          f"{'pass' if sol.passed else 'FAIL'}")
    raise _Done(EXIT_OK if sol.passed else EXIT_FAIL,
                {**record, "status": "pass" if sol.passed else "fail",
                 "max_residual": sol.max_residual, "max_abs_u": sol.max_abs_u})


def cmd_pde_solve(args) -> int:
    op = PlaneWaveOperator(fileio.parse_pairs(args.factors, "factors"))
    texts = [s.strip() for s in args.v.split(";")]
    if any(not s for s in texts):
        raise FormatError("--v: empty profile entry")
    if len(texts) != op.r:
        raise FormatError(f"--v gives {len(texts)} profiles for {op.r} factors")
    from . import expr as ex
    u = plane_wave_solution(op, [ex.parse(s, ("t",)) for s in texts])
    domain = fileio.parse_domain(args.domain or DEFAULT_DOMAIN)
    X, Y = domain.mesh(args.grid)
    U = u(X, Y)
    fileio.write_samples(args.out, X, Y, U)
    sol = verify_solution(op, u, domain, min(args.grid, 101))
    print(f"u = {u.expr}")
    print(f"wrote {X.size} samples to {args.out}; residual {sol.max_residual:.3e}")
    raise _Done(EXIT_OK, {"command": "pde solve", "status": "ok", "u": str(u.expr),
                          "out": str(args.out), "samples": int(X.size),
                          "max_abs_u": float(np.max(np.abs(U))),
                          "max_residual": sol.max_residual})


# -- parser ----------------------------------------------------------------------

def _add_source(p):
    p.add_argument("--f", help="expression in x and y")
    p.add_argument("--samples", help='CSV file with header "x,y,f" on a complete uniform grid')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridge-split",
        description="Split bivariate functions into ridge-function sums and check "
                    "plane-wave solutions of factored PDE operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-dirs", help="validate a direction set")
    p.add_argument("--dirs", required=True, help='directions "a,b;a,b;..."')
    p.add_argument("--tol-indep", type=_positive, default=1e-12)
    p.set_defaults(func=cmd_check_dirs)

    p = sub.add_parser("decompose", help="decompose F into smooth ridge profiles")
    _add_source(p)
    p.add_argument("--dirs", required=True, help='directions "a,b;a,b;..."')
    p.add_argument("--domain", help='rectangle "x0,x1,y0,y1" (default -1,1,-1,1)')
    p.add_argument("--grid", type=_grid, default=1025, help="nodes per profile")
    p.add_argument("--method", choices=("symbolic", "numeric"))
    p.add_argument("--smoothness", type=int, help="smoothness class hint k of F")
    p.add_argument("--axis-pair", help='override the axis pair, e.g. "0,1"')
    p.add_argument("--out", default="decomposition.json")
    p.add_argument("--emit-plot-data", action="store_true",
                   help="write profile and reconstruction tables as plain text")
    p.add_argument("--plot-dir", help="directory for plot data (default <out>_plot)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="re-check a decomposition file on a fresh grid")
    p.add_argument("--decomposition", "--in", dest="decomposition", required=True)
    _add_source(p)
    p.add_argument("--grid", type=_grid, default=97)
    p.add_argument("--tol", type=_positive)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ridge-defect", help="iterated increment representability test")
    _add_source(p)
    p.add_argument("--dirs", required=True)
    p.add_argument("--domain")
    p.add_argument("--deltas", help="increment sizes, one or one per direction")
    p.add_argument("--grid", type=_grid, default=65)
    p.add_argument("--tol", type=_positive, help="exit 3 when the defect exceeds this")
    p.set_defaults(func=cmd_ridge_defect)

    pde = sub.add_parser("pde", help="plane-wave solutions of factored operators")
    psub = pde.add_subparsers(dest="mode", required=True)
    p = psub.add_parser("verify", help="apply the operator to u")
    p.add_argument("--factors", required=True, help='factors "alpha,beta;..."')
    p.add_argument("--u", required=True, help="candidate solution in x and y")
    p.add_argument("--domain")
    p.add_argument("--grid", type=_grid, default=101)
    p.add_argument("--tol", type=_positive, default=1e-8)
    p.add_argument("--method", choices=("symbolic", "numeric"), default="symbolic")
    p.add_argument("--corollary", action="store_true",
                   help="decompose u along the operator's wave directions first")
    p.add_argument("--decompose-grid", type=_grid, default=1025)
    p.set_defaults(func=cmd_pde_verify)
    p = psub.add_parser("solve", help="sample a plane-wave solution")
    p.add_argument("--factors", required=True)
    p.add_argument("--v", required=True, help='profiles in t, "v1;v2;..."')
    p.add_argument("--domain")
    p.add_argument("--grid", type=_grid, default=101)
    p.add_argument("--out", default="u_samples.csv")
    p.set_defaults(func=cmd_pde_solve)
    return parser


def _normalize_argv(argv: Sequence[str]) -> list[str]:
    """Glue "--opt -1,1,..." into "--opt=-1,1,..." so argparse accepts it."""
    out: list[str] = []
    it = iter(range(len(argv)))
    skip = False
    for i in it:
        if skip:
            skip = False
            continue
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None
                and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            skip = True
        else:
            out.append(tok)
    return out


def _thread_cap() -> int | None:
    """Read ``RIDGE_SPLIT_THREADS``; the work is single-threaded, so it is only validated."""
    raw = os.environ.get("RIDGE_SPLIT_THREADS")
    if raw is None or not raw.strip():
        return None
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap < 1:
        raise FormatError(f"RIDGE_SPLIT_THREADS must be a positive integer, got {raw!r}")
    return cap


def main(argv: Sequence[str] | None = None) -> int:
    argv = _normalize_argv(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
        if code != 0:
            _emit_record({"status": "error", "error": "invalid command line",
                          "exit_code": EXIT_INPUT})
            return EXIT_INPUT
        return EXIT_OK
    command = args.command + (f" {args.mode}" if args.command == "pde" else "")
    try:
        _thread_cap()
        args.func(args)
        code, record = EXIT_OK, {"command": command, "status": "ok"}
    except _Done as done:
        code, record = done.code, done.record
    except RepresentabilityError as err:
        print(f"error: {err}", file=sys.stderr)
        code, record = EXIT_DEFECT, {"command": command, "status": "defect",
                                     "error": str(err), "defect": err.defect}
    except (FormatError, ExprError, DirectionError, CalculusError, RidgeSplitError,
            ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        code, record = EXIT_INPUT, {"command": command, "status": "error",
                                    "error_type": type(err).__name__, "error": str(err)}
    record["exit_code"] = code
    _emit_record(record)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
