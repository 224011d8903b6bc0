"""Command-line front end.

Subcommands: ``cut``, ``spectrum``, ``gen``, ``verify``, ``bench``.  Exit
status is 2 for usage errors, 1 for input or validation errors and 0
otherwise; a failed certificate is a result (``"verdict": "fail"``), not an
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import secrets
import sys
import time

import numpy as np

from . import __version__
from .certify import brute_force_k_cuts, brute_force_min_expansion, verify_lower_bound
from .experiments import run_appendix_a, run_fig2
from .graph import GraphError, gen_test_family, load_edge_list
from .rounding import default_trials, many_sparse_cuts
from .spectral import DEFAULT_TOL, ConvergenceError, spectral_data

log = logging.getLogger("kcuts")


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        for piece in item.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                raise GraphError(f"parameter {piece!r} is not key=value")
            key, raw = piece.split("=", 1)
            key = key.strip().replace("-", "_")
            raw = raw.strip()
            try:
                val = int(raw)
            except ValueError:
                try:
                    val = float(raw)
                except ValueError:
                    raise GraphError(f"parameter {key} has non-numeric value {raw!r}") from None
            out[key] = val
    return out


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to ``None``."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return val if math.isfinite(val) else None
    return obj


def _read_graph(path: str | None):
    if path in (None, "-"):
        return load_edge_list(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def _read_cuts(path: str) -> list[list[int]]:
    sets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                sets.append([int(tok) for tok in line.split()])
            except ValueError:
                raise GraphError(f"{path}:{lineno}: vertex ids must be integers") from None
    if not sets:
        raise GraphError(f"{path}: no sets found")
    return sets


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, config: dict, seed, result: dict, started: float, timing: bool) -> str:
    doc = {"tool": "kcuts", "version": __version__, "command": command, "config": config, "seed": seed, "result": result}
    if timing:
        doc["duration_s"] = time.perf_counter() - started
    return json.dumps(_clean(doc), indent=2) + "\n"


def _resolve_seed(seed):
    return secrets.randbits(32) if seed is None else seed


# --------------------------------------------------------------------------


def cmd_cut(args, started):
    g = _read_graph(args.graph)
    if args.k < 2:
        raise GraphError("cut needs --k >= 2")
    seed = _resolve_seed(args.seed)
    trials = args.trials if args.trials is not None else default_trials(args.k)
    report = many_sparse_cuts(g, args.k, trials=trials, seed=seed, fraction=args.fraction, tol=args.tol, mode=args.mode)
    config = {
        "graph": args.graph or "-",
        "k": args.k,
        "trials": trials,
        "seed": seed,
        "fraction": args.fraction,
        "tol": args.tol,
        "mode": args.mode,
        "cert_tol": 1e-8,
    }
    if args.format == "csv-summary":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "size", "set_weight", "cut_weight", "expansion"])
        for i, c in enumerate(report.cuts):
            w.writerow([i, c.size, repr(c.set_weight), repr(c.cut_weight), repr(c.expansion)])
        return buf.getvalue()
    result = report.to_json()
    result["n"] = g.n
    return _envelope("cut", config, seed, result, started, args.timing)


def cmd_spectrum(args, started):
    g = _read_graph(args.graph)
    sd = spectral_data(g, args.k, tol=args.tol, mode=args.mode, seed=args.seed)
    config = {"graph": args.graph or "-", "k": args.k, "tol": args.tol, "mode": args.mode, "seed": args.seed}
    return _envelope("spectrum", config, args.seed, sd.to_json(), started, args.timing)


def cmd_gen(args, started):
    params = _parse_params(args.params)
    family = args.family.replace("-", "_")
    if family in ("planted", "random_geometric") and "seed" not in params:
        params["seed"] = args.seed
    g = gen_test_family(family, **params)
    header = f"kcuts {__version__} gen family={family} " + " ".join(f"{k}={v}" for k, v in params.items())
    return g.to_edge_list(header=header)


def cmd_verify(args, started):
    g = _read_graph(args.graph)
    sets = _read_cuts(args.cuts)
    m = len(sets)
    if args.lambda_k is not None:
        lam = args.lambda_k
        source = "given"
    else:
        lam = spectral_data(g, m, tol=args.tol, mode=args.mode, seed=args.seed).lambda_k
        source = "computed"
    cert = verify_lower_bound(g, sets, lam)
    result = {"certificate": cert.to_json(), "lambda_source": source}
    if args.brute_force:
        best = brute_force_min_expansion(g)
        result["brute_force_min_expansion"] = best.to_json()
        if m <= 3 and g.n <= 10:
            val, opt = brute_force_k_cuts(g, m)
            result["brute_force_k_cuts"] = {"k": m, "value": val, "sets": opt}
    config = {"graph": args.graph or "-", "cuts": args.cuts, "lambda_k": args.lambda_k, "tol": args.tol, "mode": args.mode, "brute_force": args.brute_force}
    return _envelope("verify", config, args.seed, result, started, args.timing)


def cmd_bench(args, started):
    params = _parse_params(args.params)
    seed = _resolve_seed(args.seed)
    exp = args.experiment.replace("_", "-")
    try:
        if exp == "fig2":
            rep = run_fig2(seed=seed, trials=args.trials, **params)
        elif exp == "appendix-a":
            rep = run_appendix_a(seed=seed, trials=args.trials, **params)
        else:
            raise GraphError(f"unknown experiment {args.experiment!r}")
    except TypeError as exc:
        raise GraphError(f"bad parameters for {exp}: {exc}") from None
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(rep.csv_rows())
    config = {"experiment": exp, "params": params, "seed": seed, "trials": args.trials}
    return _envelope("bench", config, seed, rep.to_json(), started, args.timing)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcuts", description="Disjoint sparse cuts from higher eigenvectors.")
    parser.add_argument("--version", action="version", version=f"kcuts {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True, seed_default=None):
        if graph:
            p.add_argument("--graph", default=None, help="edge-list file ('-' or omitted: stdin)")
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--timing", action="store_true", help="add wall-clock duration to the JSON")

    p = sub.add_parser("cut", help="find disjoint sparse cuts")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--mode", choices=["auto", "dense", "lanczos"], default="auto")
    p.add_argument("--format", choices=["json", "csv-summary"], default="json")
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("spectrum", help="bottom-k spectrum and embedding")
    common(p, seed_default=0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--mode", choices=["auto", "dense", "lanczos"], default="auto")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gen", help="emit a generated graph as an edge list")
    p.add_argument("--family", required=True)
    p.add_argument("--params", nargs="*", default=[], help="key=value pairs, comma or space separated")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised families")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check the eigenvalue lower bound on a disjoint family")
    common(p, seed_default=0)
    p.add_argument("--cuts", required=True, help="one whitespace-separated vertex list per line")
    p.add_argument("--lambda-k", type=float, default=None, help="use this eigenvalue instead of computing λ_m")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--mode", choices=["auto", "dense", "lanczos"], default="auto")
    p.add_argument("--brute-force", action="store_true", help="also run the exhaustive oracles (small graphs)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run a separation experiment")
    common(p, graph=False)
    p.add_argument("--experiment", required=True, choices=["fig2", "appendix-a", "appendix_a"])
    p.add_argument("--params", nargs="*", default=[])
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--csv", default=None, help="also write (param, quantity, value) rows here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    started = time.perf_counter()
    try:
        text = args.func(args, started)
    except (GraphError, ValueError, ConvergenceError, OSError) as exc:
        print(f"kcuts {args.command}: error: {exc}", file=sys.stderr)
        return 1
    _emit(text, args.out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
