"""Command-line entry point: ``posmap <subcommand> ...``.

Machine-readable output goes to stdout (JSON, JSON lines or CSV), logs to
stderr. Exit status: 0 success, 1 a check failed, 2 bad usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

from .analytic_conditions import classify, even_pairs
from .bloch_scan import ScanGrid, bloch_coeffs, conjecture_report, default_workers, export_csv, load_grid, scan
from .circulant_spectra import c_spectrum
from .errors import InvalidInputError, InvalidStateError, SearchFailure
from .lemma_oracle import verify_lemma
from .positivity_engine import SearchSettings, lambda_max

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("posmap")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=False))


def _settings(args) -> SearchSettings:
    return SearchSettings(restarts=args.restarts, seed=args.seed)


def cmd_spectrum(args) -> int:
    ok = True
    pairs = [(args.n, args.k)] if args.n is not None else list(even_pairs(args.n_max))
    for n, k in pairs:
        rep = c_spectrum(n, k)
        ok &= rep.bounds_ok is not False
        _emit({**rep.to_dict(), "seed": args.seed})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_classify(args) -> int:
    records = []
    for n, k in even_pairs(args.n_max):
        rec = classify(n, k, budget=args.budget, seed=args.seed, with_thm2=args.with_thm2)
        records.append(rec)
        _emit({**rec.to_dict(), "seed": args.seed})
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["n", "k", "category"])
            for rec in records:
                out.writerow([rec.n, rec.k, rec.category.value])
    failed = any(rec.prop and rec.thm2_numeric is False for rec in records)
    return EXIT_FAIL if failed else EXIT_OK


def _coeffs(args) -> tuple[complex, ...]:
    if args.phi is not None or args.theta is not None:
        if args.phi is None or args.theta is None:
            raise InvalidInputError("--phi and --theta go together")
        return bloch_coeffs(args.phi, args.theta)
    alpha = complex(args.alpha_re, args.alpha_im)
    beta = complex(args.beta_re, args.beta_im)
    if math.gcd(args.n, args.k) == 2:
        return (alpha,)
    return (alpha, beta)


def cmd_lambda_max(args) -> int:
    coeffs = _coeffs(args)
    res = lambda_max(args.n, args.k, coeffs, _settings(args))
    out = res.to_dict()
    out.pop("history")
    _emit({"n": args.n, "k": args.k, "coeffs": [[c.real, c.imag] for c in map(complex, coeffs)], **out, "seed": args.seed})
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_scan(args) -> int:
    settings = _settings(args)
    grid = ScanGrid.create(args.n, args.k, args.phi_res, args.theta_res, settings)

    def progress(p, t, lam, ok):
        log.info("phi=%.4f theta=%.4f lambda_max=%.6f converged=%s", grid.phi_values[p], grid.theta_values[t], lam, ok)

    grid = scan(args.n, args.k, grid, settings, args.checkpoint, workers=default_workers(), progress=progress)
    if args.export_csv:
        export_csv(grid, args.export_csv)
    _emit({"n": args.n, "k": args.k, "points": int(grid.lambda_grid.size), "all_converged": bool(grid.converged.all()), "seed": args.seed})
    return EXIT_OK if grid.converged.all() else EXIT_FAIL


def cmd_report(args) -> int:
    grid = load_grid(args.checkpoint)
    rep = conjecture_report(grid, args.tol)
    _emit({**rep.to_dict(), "seed": grid.meta["settings"]["seed"]})
    good = rep.range_ok and rep.symmetry_defect <= args.tol
    return EXIT_OK if good else EXIT_FAIL


def cmd_verify_lemma(args) -> int:
    ok = True
    for rec in verify_lemma(args.n_max, args.samples, args.seed):
        ok &= rec.ok
        _emit({**rec.to_dict(), "seed": args.seed})
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posmap", description="Positivity checks for subtracted tau_{n,k} maps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        return p

    p = add("spectrum", cmd_spectrum, "closed-form spectrum of (C + C^T)/2")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n-max", type=int, default=30)

    p = add("classify", cmd_classify, "sufficient-condition category for every even pair")
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--with-thm2", action="store_true")
    p.add_argument("--csv", metavar="PATH", help="also write n,k,category as CSV")

    p = add("lambda-max", cmd_lambda_max, "largest admissible subtraction weight")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha-re", type=float, default=1.0)
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--beta-re", type=float, default=0.0)
    p.add_argument("--beta-im", type=float, default=0.0)
    p.add_argument("--phi", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--restarts", type=int, default=50)

    p = add("scan", cmd_scan, "lambda_max over a Bloch-sphere grid (gcd 3)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--phi-res", type=int, default=24)
    p.add_argument("--theta-res", type=int, default=13)
    p.add_argument("--restarts", type=int, default=25)
    p.add_argument("--checkpoint", metavar="PATH")
    p.add_argument("--export-csv", metavar="PATH")

    p = add("report", cmd_report, "range and symmetry summary of a finished scan")
    p.add_argument("--checkpoint", metavar="PATH", required=True)
    p.add_argument("--tol", type=float, default=0.05)

    p = add("verify-lemma", cmd_verify_lemma, "sample the bilinear lower bound")
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--samples", type=int, default=10000)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"posmap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except (InvalidInputError, FileNotFoundError) as exc:
        print(f"posmap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidStateError, SearchFailure) as exc:
        print(f"posmap: failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
