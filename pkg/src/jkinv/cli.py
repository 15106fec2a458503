"""``jk`` command line: build algebras, compute invariants, run scans.

Exit codes: 0 match, 1 mismatch, 2 usage or configuration error,
3 no prediction available.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from jkinv import coadjoint
from jkinv.exactla import MAX_MODULUS, MERSENNE61, PrimeField, SeededRng, random_vector
from jkinv.liealg import (
    AlgebraFormatError,
    InvalidParameterError,
    LieAlgebra,
    build_semidirect,
    check_jacobi,
    index_of,
    load_algebra,
    save_algebra,
)
from jkinv.pencil import KroneckerStructure, NonGenericSampleError, algebra_structure
from jkinv.predict import Source, compare, decompose, predicted_invariants

log = logging.getLogger("jkinv")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2, 3

CSV_COLUMNS = [
    "n", "k", "d", "r", "dim", "index_predicted", "index_computed", "sizes_predicted",
    "sizes_computed", "jordan_dim", "source", "match", "seed", "prime",
]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    prime: int = MERSENNE61
    seed: int = 1
    trials: int = 3
    out: Path | None = None
    fmt: str = "json"
    jobs: int = 1

    def validate(self) -> None:
        from sympy import isprime

        if self.trials < 1:
            raise ConfigError("--trials must be at least 1")
        if not (2 < self.prime < MAX_MODULUS) or not isprime(self.prime):
            raise ConfigError(f"--prime must be an odd prime below 2**62, got {self.prime}")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.prime)


def child_seed(master: int, *coords) -> int:
    """Stable 63-bit seed derived from the master seed and case coordinates."""
    key = ":".join(str(c) for c in (master, *coords)).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def _sizes_desc(sizes) -> list[int]:
    return sorted(sizes, reverse=True)


def _sizes_field(sizes) -> str:
    return ";".join(str(s) for s in _sizes_desc(sizes))


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _parse_range(text: str) -> range:
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}; use A:B (inclusive)") from exc
    return range(lo, hi + 1)


def _parse_case(text: str) -> tuple[int, int]:
    try:
        n, k = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad case {text!r}; use N,K") from exc
    return n, k


# core runs


def analyze(L: LieAlgebra, cfg: RunConfig, seed: int) -> tuple[int, KroneckerStructure]:
    F = cfg.field
    rng = SeededRng(seed)
    index = index_of(L, cfg.trials, rng, F)
    structure = algebra_structure(L, cfg.trials, rng, F)
    return index, structure


def compute_case(n: int, k: int, cfg: RunConfig) -> dict:
    """One (n, k) case: computed structure, prediction and match flags."""
    par = decompose(n, k)
    seed = child_seed(cfg.seed, n, k)
    L = build_semidirect(n, k)
    index, ks = analyze(L, cfg, seed)
    pred = predicted_invariants(n, k)
    row = {
        "n": n, "k": k, "d": par.d, "r": par.r, "dim": L.dim,
        "index": index,
        "kronecker_sizes": _sizes_desc(ks.block_sizes),
        "jordan_dim": ks.jordan_dim,
        "seed": seed,
        "prediction": pred,
        "match": None,
    }
    if pred.source in (Source.THEOREM, Source.CONJECTURE):
        rep = compare(pred, ks, index, cfg.prime)
        row["match"] = {"index": rep.match_index, "sizes": rep.match_sizes, "kronecker_type": rep.kronecker_type}
        row["notes"] = list(rep.notes)
    return row


def _prediction_json(pred) -> dict:
    return {
        "source": pred.source.value,
        "index": pred.index,
        "sizes": _sizes_desc(pred.block_sizes),
        **({"l": pred.l, "b": pred.b} if pred.source is Source.CONJECTURE else {}),
    }


# subcommands


def cmd_algebra(args, cfg: RunConfig) -> int:
    L = build_semidirect(args.n, args.k)
    if args.out is None:
        from jkinv.liealg import algebra_to_dict

        sys.stdout.write(json.dumps(algebra_to_dict(L), indent=1) + "\n")
    else:
        save_algebra(L, args.out)
    return EXIT_OK


def cmd_compute(args, cfg: RunConfig) -> int:
    if args.algebra is not None:
        if args.n is not None or args.k is not None:
            raise ConfigError("--algebra cannot be combined with --n/--k")
        L = load_algebra(args.algebra)
        if args.check_jacobi and not check_jacobi(L):
            raise ConfigError(f"{args.algebra}: structure constants violate the Jacobi identity")
        seed = child_seed(cfg.seed, "file")
        index, ks = analyze(L, cfg, seed)
        report = {
            "n": None, "k": None, "p": cfg.prime, "seed": seed, "trials": cfg.trials,
            "dim": L.dim, "index": index,
            "kronecker_sizes": _sizes_desc(ks.block_sizes), "jordan_dim": ks.jordan_dim,
        }
        _emit(json.dumps(report, indent=1) + "\n", cfg.out)
        return EXIT_OK
    if args.n is None or args.k is None:
        raise ConfigError("give --n and --k, or --algebra")
    build_semidirect(args.n, args.k)  # parameter validation
    row = compute_case(args.n, args.k, cfg)
    pred = row["prediction"]
    report = {
        "n": row["n"], "k": row["k"], "p": cfg.prime, "seed": row["seed"], "trials": cfg.trials,
        "dim": row["dim"], "index": row["index"],
        "kronecker_sizes": row["kronecker_sizes"], "jordan_dim": row["jordan_dim"],
    }
    code = EXIT_OK
    if args.predict != "none":
        report["prediction"] = _prediction_json(pred)
        if pred.source is Source.UNSUPPORTED:
            code = EXIT_UNSUPPORTED
        elif row["match"] is not None:
            report["match"] = row["match"]
            if row["notes"]:
                report["notes"] = row["notes"]
            if not all(row["match"].values()):
                code = EXIT_MISMATCH
    _emit(json.dumps(report, indent=1) + "\n", cfg.out)
    return code


def scan_cases(args) -> list[tuple[int, int]]:
    cases: list[tuple[int, int]] = [_parse_case(c) for c in args.case or []]
    if args.n_range is not None:
        for n in _parse_range(args.n_range):
            ks = _parse_range(args.k_range) if args.k_range is not None else range(2, n)
            cases.extend((n, k) for k in ks)
    elif args.k_range is not None:
        raise ConfigError("--k-range needs --n-range")
    if not cases:
        raise ConfigError("scan has no cases (empty range)")
    for n, k in cases:
        if n < 2 or k < 1:
            raise ConfigError(f"invalid case n={n}, k={k}")
    return cases


def _csv_row(row: dict, prime: int) -> list:
    pred = row["prediction"]
    if row["match"] is None:
        match = "n/a"
    else:
        match = "true" if all(row["match"].values()) else "false"
    return [
        row["n"], row["k"], row["d"], row["r"], row["dim"],
        "" if pred.index is None else pred.index, row["index"],
        _sizes_field(pred.block_sizes), _sizes_field(row["kronecker_sizes"]),
        row["jordan_dim"], pred.source.value, match, row["seed"], prime,
    ]


def cmd_scan(args, cfg: RunConfig) -> int:
    cases = scan_cases(args)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(lambda nk: compute_case(nk[0], nk[1], cfg), cases))
    else:
        rows = [compute_case(n, k, cfg) for n, k in cases]
    code = EXIT_OK
    for row in rows:
        src = row["prediction"].source
        ok = row["match"] is not None and all(row["match"].values())
        log.info("n=%d k=%d %s sizes=%s match=%s", row["n"], row["k"], src.value, row["kronecker_sizes"], ok)
        if src is Source.THEOREM and not ok:
            code = EXIT_MISMATCH
    if cfg.fmt == "json":
        payload = [dict(zip(CSV_COLUMNS, _csv_row(r, cfg.prime))) for r in rows]
        _emit(json.dumps(payload, indent=1) + "\n", cfg.out)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(_csv_row(r, cfg.prime) for r in rows)
        _emit(buf.getvalue(), cfg.out)
    return code


def invariants_report(n: int, k: int, cfg: RunConfig, points: int = 5) -> dict:
    if not 1 <= k < n:
        raise ConfigError(f"invariants need 1 <= k < n, got n={n}, k={k}")
    F = cfg.field
    L = build_semidirect(n, k)
    par = decompose(n, k)
    seed = child_seed(cfg.seed, "invariants", n, k)
    rng = SeededRng(seed)
    sels = coadjoint.selectors(n, k)
    xs = [random_vector(L.dim, rng, F) for _ in range(points)]
    per_selector = []
    for sel in sels:
        try:
            homog = coadjoint.homogeneity_check(L, sel, rng, F)
        except coadjoint.InconclusiveError:
            homog = None
        residual_zero = all(not coadjoint.ad_invariance_residual(L, x, sel, F).any() for x in xs)
        per_selector.append({
            "selector": list(sel),
            "degree": coadjoint.invariant_degree(n, k),
            "homogeneous": homog,
            "ad_invariant": residual_zero,
        })
    theorem = par.r in (1, k - 1)
    rank = coadjoint.independence_rank(L, xs[0], F, sels)
    report = {
        "n": n, "k": k, "d": par.d, "r": par.r, "p": cfg.prime, "seed": seed,
        "theorem_case": theorem,
        "selectors": per_selector,
        "degrees": [s["degree"] for s in per_selector],
        "independence_rank": rank,
        "num_selectors": len(sels),
    }
    if theorem:
        report["degree_sum_check"] = coadjoint.degree_sum_check(n, k)
        report["all_pass"] = (
            all(s["homogeneous"] and s["ad_invariant"] for s in per_selector)
            and rank == k
            and report["degree_sum_check"]
        )
    return report


def cmd_invariants(args, cfg: RunConfig) -> int:
    report = invariants_report(args.n, args.k, cfg, args.points)
    _emit(json.dumps(report, indent=1) + "\n", cfg.out)
    if report["theorem_case"] and not report["all_pass"]:
        return EXIT_MISMATCH
    return EXIT_OK


# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", "-p", type=int, default=MERSENNE61, help="field modulus (default 2**61-1)")
    common.add_argument("--seed", type=int, default=1, help="master seed; JK_SEED overrides")
    common.add_argument("--trials", type=int, default=3)
    common.add_argument("--out", "-o", type=Path, default=None, help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="jk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", parents=[common], help="write sl(n) x| (C^n)^k as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("compute", parents=[common], help="Jordan-Kronecker invariants of one algebra")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--algebra", type=Path, help="algebra JSON file instead of --n/--k")
    p.add_argument("--predict", choices=["auto", "none"], default="auto")
    p.add_argument("--no-check-jacobi", dest="check_jacobi", action="store_false")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("scan", parents=[common], help="batch over (n, k) cases, CSV rows")
    p.add_argument("--n-range", help="A:B inclusive")
    p.add_argument("--k-range", help="A:B inclusive (default 2:n-1)")
    p.add_argument("--case", action="append", metavar="N,K", help="explicit case, repeatable")
    p.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("invariants", parents=[common], help="check the explicit coadjoint invariants")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--points", type=int, default=5)
    p.set_defaults(func=cmd_invariants)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    seed = args.seed
    if os.environ.get("JK_SEED"):
        try:
            seed = int(os.environ["JK_SEED"])
        except ValueError:
            parser.error("JK_SEED must be an integer")
    cfg = RunConfig(
        prime=args.prime, seed=seed, trials=args.trials, out=args.out,
        fmt=getattr(args, "fmt", "json"), jobs=getattr(args, "jobs", 1),
    )
    try:
        cfg.validate()
        return args.func(args, cfg)
    except (ConfigError, InvalidParameterError, AlgebraFormatError, OSError) as exc:
        print(f"jk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonGenericSampleError as exc:
        print(f"jk: sampling failed: {exc}; retry with another --seed", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
