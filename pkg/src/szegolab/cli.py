"""Command-line front end.

Every command writes one or more CSV files plus ``manifest.json`` (all
flags and numerical knobs that affect the CSV) into ``--out``.

Exit codes: 0 ok, 2 parse error, 3 non-canonical symbol, 4 no convergence,
5 singular symbol or matrix, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import tempfile
from pathlib import Path

from . import asymptotics, besov, determinants, symbol
from .besov import KreinParams
from .dsl import parse_symbol
from .errors import (
    DomainError,
    InvalidParams,
    NoConvergence,
    NonCanonicalSymbol,
    ParseError,
    SingularMatrix,
    SingularSymbol,
)
from .factorization import (
    compute_b_c,
    factorization_to_document,
    factorize_left,
    factorize_right,
    validate_factorization,
)
from .schatten import hilbert_schmidt_hankel_exact, schatten_norm, schatten_scan
from .sections import hankel_section, hankel_tilde_section

EXIT_OK, EXIT_PARSE, EXIT_NONCANONICAL, EXIT_NOCONV, EXIT_SINGULAR = 0, 2, 3, 4, 5

COMMANDS = ("analyze", "factorize", "szego", "higher-order", "schatten", "besov")


def _fmt(x) -> str:
    if isinstance(x, complex):
        return f"{x.real:.16e}"
    if isinstance(x, float):
        return f"{x:.16e}"
    return str(x)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _complex_rows(name: str, z: complex):
    return [(f"{name}_re", float(z.real)), (f"{name}_im", float(z.imag))]


def _params(args) -> KreinParams | None:
    if all(getattr(args, k) is None for k in ("p", "q", "alpha", "beta")):
        return None
    return KreinParams(args.p, args.q, args.alpha, args.beta)


def _load(args) -> symbol.FourierSymbol:
    if args.symbol is not None:
        return parse_symbol(args.symbol)
    return symbol.load_symbol(args.symbol_file)


def _check_out(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=out):
        pass


def _manifest(args, extra: dict) -> dict:
    return {
        "command": args.command,
        "symbol": args.symbol,
        "symbol_file": args.symbol_file,
        "n_max": args.n_max,
        "big_m": args.big_m,
        "tol": args.tol,
        "p": args.p, "q": args.q, "alpha": args.alpha, "beta": args.beta,
        "force_m": args.force_m,
        "knobs": {
            "coefficient_drop_threshold": symbol.DROP_THRESHOLD,
            "min_grid": symbol.MIN_GRID,
            "max_grid": symbol.MAX_GRID,
            "singular_det_rtol": symbol.SINGULAR_DET_RTOL,
            "lu_pivot_floor": determinants.PIVOT_FLOOR,
            "besov_s_range": [besov.S_MIN, besov.S_MAX],
            "besov_nodes_per_decade": besov.NODES_PER_DECADE,
            "besov_rtol": 1e-6,
            "f_entry_tol": asymptotics.ENTRY_TOL,
            "rhs_rtol": 1e-8,
            "szego_constant_rtol": 1e-12,
            "geometric_mean_tol": 1e-12,
            "radii": "r_j = 1 - 2^-j, j = 3..20",
        },
        **extra,
    }


def cmd_analyze(a, args, out: Path) -> dict:
    rows = [("block_size", a.N), ("lo", a.lo), ("hi", a.hi), ("tail_bound", a.tail_bound)]
    w = symbol.winding_number(a)
    rows.append(("winding", w))
    if w == 0:
        rows += _complex_rows("geometric_mean", determinants.geometric_mean(a))
    size = max(a.bandwidth, 1)
    rows.append(("hs_norm_H_a_exact", hilbert_schmidt_hankel_exact(a)))
    rows.append(("hs_norm_H_atilde_exact", hilbert_schmidt_hankel_exact(symbol.tilde(a))))
    for p in (1.0, 2.0, math.inf):
        rows.append((f"schatten_{p:g}_H_a", schatten_norm(hankel_section(a, size, size), p)))
        rows.append((f"schatten_{p:g}_H_atilde", schatten_norm(hankel_tilde_section(a, size, size), p)))
    rows.append(("krein_coefficient_sum", besov.krein_coefficient_sum(a)))
    params = _params(args)
    if params is not None:
        lam, m = besov.conjugation_number(params)
        rows += [("conjugation_number", lam), ("m", m), ("krein_norm", besov.krein_norm(a, params))]
    _write_rows(out / "analyze.csv", ("quantity", "value"), rows)
    return {"files": ["analyze.csv"]}


def cmd_factorize(a, args, out: Path) -> dict:
    right = factorize_right(a, args.tol)
    left = factorize_left(a, args.tol)
    b, c = compute_b_c(right, left)
    (out / "right.json").write_text(json.dumps(factorization_to_document(right), indent=1))
    (out / "left.json").write_text(json.dumps(factorization_to_document(left), indent=1))
    symbol.save_symbol(b, out / "b.json")
    symbol.save_symbol(c, out / "c.json")
    rows = []
    for f in (right, left):
        rep = validate_factorization(a, f, args.tol)
        rows.append((f.side, f.residual, f.section_n, f.u_minus.lo, f.u_plus.hi,
                     int(rep.passed)))
    _write_rows(out / "factorize.csv",
                ("side", "residual", "section_n", "minus_lo", "plus_hi", "valid"), rows)
    return {"files": ["factorize.csv", "right.json", "left.json", "b.json", "c.json"]}


def cmd_szego(a, args, out: Path) -> dict:
    rep = asymptotics.szego_widom_scan(a, args.n_max, args.tol, jobs=args.jobs)
    (out / "szego.csv").write_text(rep.to_csv())
    return {"files": ["szego.csv"], "report": rep.metadata}


def cmd_higher_order(a, args, out: Path) -> dict:
    params = _params(args)
    rep = asymptotics.higher_order_scan(a, params, args.n_max, args.big_m,
                                        force_m=args.force_m, tol=args.factor_tol,
                                        jobs=args.jobs)
    (out / "higher_order.csv").write_text(rep.to_csv())
    return {"files": ["higher_order.csv"], "report": rep.metadata}


def cmd_schatten(a, args, out: Path) -> dict:
    p = args.p if args.p is not None else 2.0
    sizes = [s for s in (2 ** k for k in range(0, 13)) if s <= max(args.n_max, 1)]
    rows = [(n, "H(a)", p, v) for n, v in schatten_scan(a, p, sizes)]
    rows += [(n, "H(a~)", p, v) for n, v in schatten_scan(a, p, sizes, tilde_side=True)]
    _write_rows(out / "schatten.csv", ("size", "operator", "p", "norm"), rows)
    return {"files": ["schatten.csv"], "schatten_p": p, "sizes": sizes}


def cmd_besov(a, args, out: Path) -> dict:
    p = args.p if args.p is not None else 2.0
    alpha = args.alpha if args.alpha is not None else 1.0 / p
    q = args.q if args.q is not None else p
    beta = args.beta if args.beta is not None else 1.0 / q
    rows = [
        ("Qa", p, alpha, besov.besov_seminorm(symbol.riesz_project(a, "Q"), p, alpha),
         besov.besov_norm(symbol.riesz_project(a, "Q"), p, alpha)),
        ("Pa", q, beta, besov.besov_seminorm(symbol.riesz_project(a, "P"), q, beta),
         besov.besov_norm(symbol.riesz_project(a, "P"), q, beta)),
    ]
    _write_rows(out / "besov.csv", ("part", "p", "alpha", "seminorm", "norm"), rows)
    extra = {"files": ["besov.csv"]}
    params = _params(args)
    if params is not None:
        extra["krein_norm"] = besov.krein_norm(a, params)
    return extra


HANDLERS = {
    "analyze": cmd_analyze,
    "factorize": cmd_factorize,
    "szego": cmd_szego,
    "higher-order": cmd_higher_order,
    "schatten": cmd_schatten,
    "besov": cmd_besov,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="szegolab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--symbol", help="symbol expression, e.g. '(1+0.5*z)*(1+0.5/z)'")
    src.add_argument("--symbol-file", help="JSON coefficient document")
    ap.add_argument("--n-max", type=int, default=64)
    ap.add_argument("--big-m", type=int, default=None,
                    help="block truncation of the H^2 model for F_{n,k} (default: automatic)")
    ap.add_argument("--tol", type=float, default=None,
                    help="scan tolerance (szego, default 1e-6) or factorization tolerance (1e-10)")
    ap.add_argument("--p", type=float)
    ap.add_argument("--q", type=float)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--beta", type=float)
    ap.add_argument("--force-m", type=int)
    ap.add_argument("--out", default="szegolab_out")
    ap.add_argument("--jobs", type=int, default=1)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is None:
        args.tol = 1e-6 if args.command == "szego" else 1e-10
    args.factor_tol = args.tol if args.command != "szego" else 1e-10
    if args.tol <= 0 or args.n_max < 0 or args.jobs < 1:
        print("error: tolerances must be positive, --n-max >= 0, --jobs >= 1", file=sys.stderr)
        return 1
    out = Path(args.out)
    try:
        _check_out(out)
    except OSError as exc:
        print(f"error: output directory {out} is not writable: {exc}", file=sys.stderr)
        return 1
    try:
        a = _load(args)
        extra = HANDLERS[args.command](a, args, out)
    except (ParseError, json.JSONDecodeError, KeyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonCanonicalSymbol as exc:
        w = f" (winding {exc.winding})" if exc.winding is not None else ""
        print(f"non-canonical symbol{w}: {exc}", file=sys.stderr)
        return EXIT_NONCANONICAL
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (SingularSymbol, SingularMatrix) as exc:
        print(f"singular: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (InvalidParams, DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest = _manifest(args, extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True, default=str))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
