"""Command-line front end: batch queries with text or JSON output.

Commands
--------

``stats``    counts for one (n, r): partitions, subsets, transversal pairs,
             square census, and the full label spectrum.
``label``    the permutation label of one (kernel, image) pair.
``squares``  stream every ordered square as newline-delimited JSON.
``present``  print the generating presentation (optionally one family).
``reduce``   run the reduction pipeline; optionally write the derivation log.
``replay``   re-check a derivation log with the independent verifier.
``verify``   end-to-end theorem check, optionally with the coset oracle.

Exit codes: 0 success, 2 usage (including cap violations), 3 precondition
failure, 4 verification failure, 5 budget exhausted.  Output for a fixed
command line is byte-identical across runs; streams are newline-delimited
JSON with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .combinatorics import Partition, Subset
from .errors import (
    BudgetExhausted,
    InvalidParameters,
    NotASquare,
    NotEliminable,
    TransversalityViolation,
)
from .labels import label_with_context, label_spectrum
from .presentation import build_presentation, word_str
from .squares import (
    enumerate_squares,
    is_singular_sq3,
    square_census,
    square_record,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFY = 4
EXIT_BUDGET = 5

HARD_CAP = 12
SQUARES_WARN_ABOVE = 8


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated common settings for one command invocation."""

    n: int
    r: int
    format: str = "text"
    jobs: int = 1
    seed: int = 0
    override_cap: bool = False
    allow_boundary: bool = False

    def validate(self, theorem_command: bool = False) -> None:
        if not (1 <= self.r <= self.n):
            raise UsageError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if self.n > HARD_CAP and not self.override_cap:
            raise UsageError(
                f"n={self.n} exceeds the cap n <= {HARD_CAP}; pass --override-cap to proceed"
            )
        if theorem_command and self.r > self.n - 2 and not self.allow_boundary:
            raise UsageError(
                f"theorem commands need r <= n-2 (got r={self.r}, n={self.n}); "
                "pass --allow-boundary to run the boundary regime"
            )
        if self.jobs < 1:
            raise UsageError(f"jobs must be >= 1, got {self.jobs}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            n=getattr(args, "n", 1),
            r=getattr(args, "r", 1),
            format=getattr(args, "format", "text"),
            jobs=getattr(args, "jobs", 1),
            seed=getattr(args, "seed", 0),
            override_cap=getattr(args, "override_cap", False),
            allow_boundary=getattr(args, "allow_boundary", False),
        )


def _emit_json(doc: dict, out) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _parse_pair(p_text: str, a_text: str, n: Optional[int]) -> tuple[Partition, Subset]:
    part = Partition.parse(p_text, n)
    return part, Subset.parse(a_text, part.n)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_stats(args, out) -> int:
    cfg = RunConfig.from_args(args)
    cfg.validate()
    census = square_census(cfg.n, cfg.r)
    spectrum = label_spectrum(cfg.n, cfg.r)
    ordered = sorted(spectrum.items(), key=lambda kv: kv[0].images)
    singular_total = census.singular_proper + census.singular_degenerate
    if cfg.format == "json":
        doc = census.to_json()
        doc["singular_total"] = singular_total
        doc["label_spectrum"] = {p.cycle_form(): c for p, c in ordered}
        _emit_json(doc, out)
        return EXIT_OK
    out.write(f"n={cfg.n} r={cfg.r}\n")
    out.write(f"partitions: {census.partitions}\n")
    out.write(f"subsets: {census.subsets}\n")
    out.write(f"transversal pairs: {census.transversal_pairs}\n")
    out.write(f"ordered squares: {census.squares}\n")
    out.write(f"proper squares: {census.proper_squares}\n")
    out.write(
        f"singular squares: {singular_total} "
        f"(proper {census.singular_proper}, degenerate {census.singular_degenerate})\n"
    )
    out.write(f"singular squares, unordered proper: {census.singular_proper_unordered}\n")
    out.write("label spectrum:\n")
    for perm, count in ordered:
        out.write(f"  {perm.cycle_form()}: {count}\n")
    return EXIT_OK


def cmd_label(args, out) -> int:
    part, sub = _parse_pair(args.P, args.A, args.n)
    cfg = RunConfig(n=part.n, r=len(part), format=args.format, override_cap=args.override_cap)
    cfg.validate()
    lam, ctx = label_with_context(part, sub)
    if cfg.format == "json":
        doc = {
            "P": part.to_json(),
            "A": sub.to_json(),
            "label": lam.cycle_form(),
            "images": lam.to_json(),
            "context": ctx.to_json(),
        }
        _emit_json(doc, out)
        return EXIT_OK
    out.write(lam.cycle_form() + "\n")
    return EXIT_OK


def cmd_squares(args, out) -> int:
    cfg = RunConfig.from_args(args)
    cfg.validate()
    if cfg.n > SQUARES_WARN_ABOVE:
        print(
            f"warning: square enumeration at n={cfg.n} is large; this may take a while",
            file=sys.stderr,
        )
    for sq in enumerate_squares(cfg.n, cfg.r):
        if args.only_singular and not is_singular_sq3(sq):
            continue
        record = square_record(sq)
        out.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
    return EXIT_OK


def cmd_present(args, out) -> int:
    cfg = RunConfig.from_args(args)
    cfg.validate()
    pres = build_presentation(cfg.n, cfg.r)
    relations = pres.relations
    if args.family != "all":
        relations = tuple(rel for rel in relations if rel.tag == args.family)
    if cfg.format == "json":
        index = {g: i for i, g in enumerate(pres.generators)}
        doc = pres.to_json()
        doc["relations"] = [
            {
                "lhs": [[index[g], e] for g, e in rel.lhs],
                "rhs": [[index[g], e] for g, e in rel.rhs],
                "tag": rel.tag,
            }
            for rel in relations
        ]
        _emit_json(doc, out)
        return EXIT_OK
    out.write(f"generators: {len(pres.generators)}\n")
    for g in pres.generators:
        out.write(g.display() + "\n")
    out.write(f"relations: {len(relations)}\n")
    for rel in relations:
        out.write(f"{word_str(rel.relator())} = 1  ## {rel.tag}\n")
    return EXIT_OK


def cmd_reduce(args, out) -> int:
    from .pipeline import run_pipeline

    cfg = RunConfig.from_args(args)
    cfg.validate(theorem_command=True)
    if cfg.r > cfg.n - 2:
        raise InvalidParameters(
            f"the reduction pipeline needs r <= n-2, got r={cfg.r}, n={cfg.n}"
        )
    final, log = run_pipeline(cfg.n, cfg.r)
    if args.log:
        with open(args.log, "w") as fh:
            json.dump(log.to_json(), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
    summary = {
        "n": cfg.n,
        "r": cfg.r,
        "steps": len(log),
        "generators": log.meta["generators"],
        "relations": log.meta["relations"],
        "survivors": log.meta["survivors"],
        "final_generators": len(final.generators),
        "final_relations": len(final.relations),
        "log_written": args.log,
    }
    if cfg.format == "json":
        _emit_json(summary, out)
        return EXIT_OK
    out.write(f"n={cfg.n} r={cfg.r}\n")
    out.write(f"generators: {summary['generators']}\n")
    out.write(f"relations: {summary['relations']}\n")
    out.write(f"derivation steps: {summary['steps']}\n")
    out.write(f"surviving generators: {summary['survivors']}\n")
    out.write(
        f"final presentation: {summary['final_generators']} generators, "
        f"{summary['final_relations']} relations\n"
    )
    if args.log:
        out.write(f"log written: {args.log}\n")
    return EXIT_OK


def cmd_replay(args, out) -> int:
    from .pipeline import DerivationLog, replay_log

    with open(args.log) as fh:
        doc = json.load(fh)
    log = DerivationLog.from_json(doc)
    report = replay_log(log)
    if args.format == "json":
        _emit_json(report.to_json(), out)
    else:
        out.write(f"log: n={report.n} r={report.r}\n")
        out.write(f"steps checked: {report.steps_checked}\n")
        out.write(f"failures: {len(report.failures)}\n")
        for idx, msg in report.failures[:20]:
            out.write(f"  step {idx}: {msg}\n")
        out.write(f"relations discharged: {report.discharged} / {report.relations}\n")
        out.write(
            "final snapshot: "
            + ("matches the Coxeter presentation" if report.final_matches else "MISMATCH")
            + "\n"
        )
        out.write("replay: " + ("PASS" if report.ok else "FAIL") + "\n")
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_verify(args, out) -> int:
    from .verification import verify_theorem

    cfg = RunConfig.from_args(args)
    cfg.validate(theorem_command=True)
    budget = args.max_cosets if args.with_coset_oracle else None
    report, _log = verify_theorem(cfg.n, cfg.r, budget=budget)
    if cfg.format == "json":
        _emit_json(report.to_json(), out)
    else:
        out.write(f"n={cfg.n} r={cfg.r}\n")
        out.write(f"pipeline: {'ok' if report.pipeline else 'failed'}\n")
        out.write(f"homomorphism: {'ok' if report.homomorphism else 'failed'}\n")
        if args.with_coset_oracle:
            shown = report.coset_order if report.coset_order is not None else "inconclusive"
            out.write(f"coset order: {shown}\n")
        out.write(f"verdict: {report.verdict}\n")
    if (
        args.with_coset_oracle
        and report.coset_result is not None
        and not report.coset_result.closed
    ):
        return EXIT_BUDGET
    return EXIT_OK if report.verdict.startswith("confirmed") else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igmax",
        description="Maximal subgroup computations over idempotent-generated "
        "transformation semigroups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--jobs", type=int, default=1, help="parallelism degree (merges are deterministic)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--override-cap", action="store_true", help=f"allow n > {HARD_CAP}")

    nr = argparse.ArgumentParser(add_help=False)
    nr.add_argument("--n", type=int, required=True)
    nr.add_argument("--r", type=int, required=True)

    p = sub.add_parser("stats", parents=[common, nr], help="counts and label spectrum")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("label", parents=[common], help="label of one (kernel, image) pair")
    p.add_argument("--P", required=True, help='kernel, e.g. "{{1},{2,3,5},{4,7},{6}}"')
    p.add_argument("--A", required=True, help='image, e.g. "{1,4,5,6}"')
    p.add_argument("--n", type=int, default=None, help="ground set size (default: max element of P)")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("squares", parents=[common, nr], help="stream ordered squares as NDJSON")
    p.add_argument("--only-singular", action="store_true")
    p.set_defaults(func=cmd_squares)

    p = sub.add_parser("present", parents=[common, nr], help="print the generating presentation")
    p.add_argument("--family", choices=("top", "middle", "bottom", "all"), default="all")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("reduce", parents=[common, nr], help="run the reduction pipeline")
    p.add_argument("--log", default=None, help="write the derivation log to this file")
    p.add_argument("--allow-boundary", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("replay", parents=[common], help="re-check a derivation log")
    p.add_argument("--log", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("verify", parents=[common, nr], help="end-to-end theorem check")
    p.add_argument("--with-coset-oracle", action="store_true")
    p.add_argument("--max-cosets", type=int, default=50_000)
    p.add_argument("--allow-boundary", action="store_true")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, sys.stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidParameters, TransversalityViolation, NotASquare, NotEliminable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
