"""Command-line interface: ``qjordan <command> [options]``.

Machine output goes to standard output, progress lines to standard error.
Exit codes: 0 success, 1 verification failed, 2 usage error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .dialgebra import DiPolynomial
from .expansion import expand, expand_poly
from .fp_linalg import DEFAULT_PRIME, ConfigurationError, check_prime
from .free_magma import (
    MAX_BASIS_DEGREE,
    MonomialSyntaxError,
    ResourceGuardError,
    comm_types,
    count_types,
    format_monomial,
    frc_basis,
    frc_dim_conjecture,
    leaves,
    parse_monomial,
    rc_types,
)
from .identity_engine import (
    GeneratorCountMismatch,
    IdentitySyntaxError,
    all_rank_direct,
    find_special_identity,
    format_identity,
    load_identity,
    old_rank_direct,
    verify_special,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
THREADS_ENV = "QJORDAN_THREADS"

__all__ = ["RunConfig", "build_parser", "main", "run"]


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    prime: int = DEFAULT_PRIME
    degree: int | None = None
    partitions: tuple[str, ...] | None = None
    content: str | None = None
    fmt: str = "text"
    threads: int = 1
    allow_large: bool = False

    def validate(self) -> None:
        try:
            check_prime(self.prime)
        except ConfigurationError as exc:
            raise UsageError(str(exc)) from None
        if self.degree is not None and self.prime <= self.degree:
            raise UsageError(f"prime {self.prime} must exceed the degree {self.degree}")
        if self.content is not None:
            if not self.content or not all("a" <= ch <= "z" for ch in self.content):
                raise UsageError("content letters must be from a-z")
            if self.prime <= len(self.content):
                raise UsageError(f"prime {self.prime} must exceed the degree {len(self.content)}")
        if self.threads < 1:
            raise UsageError("thread count must be positive")


@dataclass
class Report:
    """Command result: rendered text plus exit status."""

    text: str
    status: int = EXIT_OK


# ---------------------------------------------------------------------------
# rendering


def _render(fmt: str, columns: Sequence[str], rows: Sequence[Sequence], extra: dict | None = None) -> str:
    if fmt == "json":
        payload = {"rows": [dict(zip(columns, r)) for r in rows]}
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if fmt == "tsv":
        lines = ["\t".join(columns)] + ["\t".join(str(x) for x in r) for r in rows]
        return "\n".join(lines) + "\n"
    table = [list(map(str, columns))] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in table]
    if extra:
        lines += [f"{k}: {v}" for k, v in extra.items()]
    return "\n".join(lines) + "\n"


def _progress(enabled: bool) -> Callable[[str], None] | None:
    if not enabled:
        return None

    def emit(msg: str) -> None:
        print(msg, file=sys.stderr, flush=True)

    return emit


def _threads_default() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer") from None
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# commands


def cmd_types(args, cfg: RunConfig) -> Report:
    n = cfg.degree
    types = comm_types(n) if args.kind == "commutative" else rc_types(n)
    sizes = frc_basis(n).type_sizes() if args.kind == "right-commutative" and n <= MAX_BASIS_DEGREE else None
    columns = ["type", "monomial", "symmetries"] + (["monomials"] if sizes else [])
    rows = []
    for t in types:
        row = [t.number, str(t), len(t.symmetries)]
        if sizes:
            row.append(sizes[t.index])
        rows.append(row)
    return Report(_render(cfg.fmt, columns, rows))


def cmd_dims(args, cfg: RunConfig) -> Report:
    if args.max_degree < 1:
        raise UsageError("--max-degree must be at least 1")
    rows = []
    for n in range(1, args.max_degree + 1):
        c, r, k = count_types(n)
        dim = len(frc_basis(n)) if n <= MAX_BASIS_DEGREE else "-"
        rows.append([n, c, r, k, dim, frc_dim_conjecture(n)])
    return Report(_render(cfg.fmt, ["n", "C", "R", "K", "dim_frc", "conjecture"], rows))


def _diterms(poly: DiPolynomial, fmt: str, header: dict) -> str:
    if fmt == "json":
        header = dict(header, dimonomials=[[c, str(m)] for c, m in poly.sorted_terms()])
        return json.dumps(header, indent=2) + "\n"
    lines = [f"# {k}: {v}" for k, v in header.items()]
    lines += poly.to_lines()
    return "\n".join(lines) + "\n"


def cmd_expand(args, cfg: RunConfig) -> Report:
    if args.monomial:
        m = parse_monomial(args.monomial)
        if len(leaves(m)) > MAX_BASIS_DEGREE and not cfg.allow_large:
            raise ResourceGuardError("expansion above degree 8 needs --allow-large")
        poly = expand(m)
        source = format_monomial(m)
    else:
        ident = load_identity(args.identity)
        poly = expand_poly(ident)
        source = str(args.identity)
    if not args.exact:
        poly = poly.mod(cfg.prime)
    header = {"source": source, "arithmetic": "integer" if args.exact else f"mod {cfg.prime}", "terms": len(poly)}
    if not poly:
        header["expansion"] = "zero"
    return Report(_diterms(poly, cfg.fmt, header))


def _partition_filter(cfg: RunConfig):
    from .symrep import parse_partition

    if not cfg.partitions:
        return None
    try:
        return [parse_partition(s) for s in cfg.partitions]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_ranks(args, cfg: RunConfig) -> Report:
    n = cfg.degree
    progress = _progress(not args.quiet)
    if args.method == "direct":
        if cfg.partitions:
            raise UsageError("--partition applies to --method repn only")
        if not 4 <= n <= 6:
            raise UsageError("the direct method covers degrees 4 to 6")
        rep = old_rank_direct(n, cfg.prime)
        allr = all_rank_direct(n, cfg.prime)
        extra = {
            "generators": len(rep.generators),
            "trace": " ".join(map(str, rep.trace)),
            "retained": " ".join(map(str, rep.retained)),
        }
        rows = [[n, rep.final_rank, allr, allr - rep.final_rank]]
        return Report(_render(cfg.fmt, ["degree", "oldrank", "allrank", "new"], rows, extra))
    from .symrep import format_partition, rank_table

    rows = rank_table(n, cfg.prime, only=_partition_filter(cfg), progress=progress, workers=cfg.threads)
    out = [[format_partition(r.lam), r.d, r.old_rank, r.all_rank, r.new] for r in rows]
    extra = {}
    if not cfg.partitions:
        # translate the module multiplicities back to whole-space ranks
        t, dim = len(rc_types(n)), len(frc_basis(n))
        offset = math.factorial(n) * t - dim
        extra["oldrank"] = sum(r.d * r.old_rank for r in rows) - offset
        extra["allrank"] = sum(r.d * r.all_rank for r in rows) - offset
    return Report(_render(cfg.fmt, ["lambda", "d", "oldrank", "allrank", "new"], out, extra or None))


def cmd_table(args, cfg: RunConfig) -> Report:
    from .symrep import rank_table, table_tsv

    rows = rank_table(cfg.degree, cfg.prime, only=_partition_filter(cfg), progress=_progress(not args.quiet), workers=cfg.threads)
    if cfg.fmt == "tsv":
        return Report(table_tsv(rows))
    if cfg.fmt == "json":
        return Report(json.dumps({"degree": cfg.degree, "prime": cfg.prime, "rows": [r.as_dict() for r in rows]}, indent=2) + "\n")
    cols = ["lambda", "d", "old_rows", "old_cols", "oldrank", "all_rows", "all_cols", "allrank", "new"]
    return Report(_render("text", cols, [list(r.as_dict().values()) for r in rows]))


def _identity_output(poly, header: str, fmt: str, summary: dict, output: str | None) -> str:
    text = format_identity(poly, header)
    if output:
        Path(output).write_text(text)
    if fmt == "json":
        payload = dict(summary, identity=[[c, format_monomial(m)] for c, m in poly.sorted_terms()])
        return json.dumps(payload, indent=2) + "\n"
    notes = "".join(f"# {k}: {v}\n" for k, v in summary.items())
    return notes if output else text + notes


def cmd_glennie(args, cfg: RunConfig) -> Report:
    from .glennie import glennie_preimage

    poly = glennie_preimage(args.var)
    summary: dict = {"variable": args.var, "terms": len(poly)}
    status = EXIT_OK
    if args.verify:
        zero = not expand_poly(poly)
        summary["expansion"] = "zero" if zero else "nonzero"
        status = EXIT_OK if zero else EXIT_VERIFY
    header = f"Noncommutative preimage of the Glennie identity, x = {args.var} ({len(poly)} terms)"
    return Report(_identity_output(poly, header, cfg.fmt, summary, args.output), status)


def cmd_find_special(args, cfg: RunConfig) -> Report:
    content = "".join(sorted(cfg.content))
    if len(content) != 8:
        raise UsageError("find-special needs a content of degree 8")
    poly, rep = find_special_identity(content, cfg.prime, _progress(not args.quiet))
    summary = {
        "content": content,
        "monomials": rep.n_monomials,
        "dialgebra_monomials": rep.n_dialgebra_monomials,
        "step1_rank": rep.lifted_rank,
        "step2_rank": rep.expansion_rank,
        "nullity": rep.nullity,
        "candidates_tested": rep.candidates_tested,
    }
    if poly is None:
        summary["result"] = "no new identity"
        return Report(_render(cfg.fmt, [], [], summary) if cfg.fmt == "json" else "".join(f"# {k}: {v}\n" for k, v in summary.items()), EXIT_VERIFY)
    summary["terms"] = len(poly)
    summary["expansion"] = "zero" if not expand_poly(poly) else "nonzero"
    summary["rank_increase"] = rep.rank_increase
    header = f"Special identity in degree 8, content {content} ({len(poly)} terms)"
    return Report(_identity_output(poly, header, cfg.fmt, summary, args.output))


def cmd_verify(args, cfg: RunConfig) -> Report:
    poly = load_identity(args.identity)
    if not poly:
        raise UsageError("identity file has no terms")
    contents = poly.contents()
    if len(contents) != 1:
        raise UsageError("identity is not homogeneous")
    deg = len(next(iter(contents)))
    if not 4 <= deg <= MAX_BASIS_DEGREE:
        raise UsageError("verify handles degrees 4 to 8")
    if cfg.prime <= deg:
        raise UsageError(f"prime {cfg.prime} must exceed the degree {deg}")
    rep = verify_special(poly, cfg.prime, _progress(not args.quiet))
    summary = {
        "terms": len(poly),
        "expansion": "zero" if rep.expansion_zero else "nonzero",
        "rank_increase": rep.rank_increase,
        "commutative_terms": rep.commutative_terms,
    }
    status = EXIT_OK if rep.expansion_zero else EXIT_VERIFY
    if cfg.fmt == "json":
        return Report(json.dumps(summary, indent=2) + "\n", status)
    return Report("".join(f"{k}: {v}\n" for k, v in summary.items()), status)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=DEFAULT_PRIME, help="field characteristic (default %(default)s)")
    common.add_argument("--threads", type=int, default=None, help=f"worker count (default: ${THREADS_ENV} or all cores)")
    common.add_argument("--allow-large", action="store_true", help="lift the resource guards")
    common.add_argument("--format", dest="fmt", choices=("text", "tsv", "json"), default=None)
    common.add_argument("--quiet", action="store_true", help="no progress lines on stderr")

    parser = argparse.ArgumentParser(prog="qjordan", description="Polynomial identities of the quasi-Jordan product.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("types", parents=[common], help="list association types")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--kind", choices=("right-commutative", "commutative"), default="right-commutative")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("dims", parents=[common], help="type counts and FRC dimensions")
    p.add_argument("--max-degree", type=int, required=True)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("expand", parents=[common], help="expand a monomial or identity into the free dialgebra")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--monomial")
    g.add_argument("--identity", type=Path)
    p.add_argument("--exact", action="store_true", help="integer coefficients instead of mod p")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("ranks", parents=[common], help="old and all identity ranks")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--method", choices=("direct", "repn"), default="repn")
    p.add_argument("--partition", action="append", help="restrict to a partition (repeatable), e.g. 431")
    p.set_defaults(func=cmd_ranks)

    p = sub.add_parser("table", parents=[common], help="per-partition rank table")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--partition", action="append", help="restrict to a partition (repeatable), e.g. 431")
    p.set_defaults(func=cmd_table, default_fmt="tsv")

    p = sub.add_parser("glennie", parents=[common], help="noncommutative preimage of the Glennie identity")
    p.add_argument("--var", choices=("a", "b", "c"), required=True)
    p.add_argument("--verify", action="store_true", help="check that the expansion vanishes over the integers")
    p.add_argument("--output", help="write the identity file here")
    p.set_defaults(func=cmd_glennie)

    p = sub.add_parser("find-special", parents=[common], help="search for a new degree-8 identity")
    p.add_argument("--content", default="aaaabbbc")
    p.add_argument("--output", help="write the identity file here")
    p.set_defaults(func=cmd_find_special)

    p = sub.add_parser("verify", parents=[common], help="verify an identity file")
    p.add_argument("--identity", type=Path, required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def _config(args) -> RunConfig:
    threads = args.threads if args.threads is not None else _threads_default()
    fmt = args.fmt or getattr(args, "default_fmt", "text")
    degree = getattr(args, "degree", None)
    content = getattr(args, "content", None) if args.command == "find-special" else None
    return RunConfig(args.prime, degree, tuple(getattr(args, "partition", None) or ()) or None, content, fmt, threads, args.allow_large)


def run(args: argparse.Namespace) -> Report:
    cfg = _config(args)
    cfg.validate()
    if cfg.degree is not None and cfg.degree < 1:
        raise UsageError("--degree must be at least 1")
    if cfg.degree is not None and cfg.degree > MAX_BASIS_DEGREE and args.command != "types" and not cfg.allow_large:
        raise ResourceGuardError(f"degree {cfg.degree} exceeds the guard; pass --allow-large")
    return args.func(args, cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GeneratorCountMismatch)
            report = run(args)
    except ResourceGuardError as exc:
        print(f"qjordan: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError, MonomialSyntaxError, IdentitySyntaxError, OSError) as exc:
        print(f"qjordan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(report.text)
    sys.stdout.flush()
    return report.status


if __name__ == "__main__":
    sys.exit(main())
