"""Batch front end.

Four subcommands: ``analyze`` runs the single-system pipeline on one input
document, ``tensor`` runs the four pair checks on two documents, ``corpus``
writes the standard example corpus, and ``verify-all`` sweeps a corpus
directory and aggregates.  Exit codes are stable API: 0 success, 1 input
problem, 2 theorem-or-route failure, 3 inconclusive numerics.

Reports are deterministic bytes for a fixed input, seed, flag set, and
package version; wall-clock chatter goes to stderr only.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent import futures
from pathlib import Path

from .analysis import AnalysisConfig, PairAnalysis, SystemAnalysis, analyze_pair, analyze_system
from .corpus import load_manifest, write_corpus
from .errors import (
    DecompositionError,
    InconclusiveError,
    InputError,
    RouteDisagreementError,
    StructuralError,
    VerificationError,
)
from .linalg import DEFAULT_TOL
from .specio import (
    SCHEMA,
    VERSION,
    analysis_report,
    atomic_write_text,
    dump_report,
    load_system,
    opsys_of,
    pair_report,
    spec_digest,
)

_ENV_TOL = "CSTARENV_TOLERANCES"
_TOL_FLAGS = ("tol_rank", "tol_psd", "tol_sep", "tol_norm")


class _Parser(argparse.ArgumentParser):
    """Argument errors map to the input exit code instead of argparse's 2."""

    def error(self, message):
        raise InputError(message)


def _env_tol_defaults() -> dict:
    raw = os.environ.get(_ENV_TOL, "").strip()
    out = {}
    if not raw:
        return out
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in _TOL_FLAGS:
            raise InputError(
                f"{_ENV_TOL}: expected comma-separated key=value with keys "
                f"{', '.join(_TOL_FLAGS)}; got {part!r}"
            )
        try:
            out[key] = float(val)
        except ValueError:
            raise InputError(f"{_ENV_TOL}: {key} is not a number: {val!r}") from None
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=1, help="base seed for every probe (default 1)")
    p.add_argument("--tol-rank", type=float, default=None, help="rank/membership tolerance")
    p.add_argument("--tol-psd", type=float, default=None, help="positivity tolerance")
    p.add_argument("--tol-sep", type=float, default=None, help="point-separation threshold")
    p.add_argument("--tol-norm", type=float, default=None, help="norm-drop threshold")
    p.add_argument(
        "--falsifier-trials",
        type=int,
        default=1000,
        help="level-1 ascent chains for the isometry falsifier (default 1000)",
    )
    p.add_argument(
        "--uniqueness-trials",
        type=int,
        default=32,
        help="probe directions per uniqueness decision (default 32)",
    )
    p.add_argument(
        "--max-ambient-product",
        type=int,
        default=36,
        help="refuse pairs whose product ambient exceeds this (default 36)",
    )
    p.add_argument(
        "--json-out",
        metavar="PATH",
        default=None,
        help="write the report here (a directory for verify-all)",
    )
    p.add_argument("--quiet", action="store_true", help="suppress the human summary")
    p.add_argument(
        "--jobs", type=int, default=1, help="parallel worker processes for verify-all"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cstarenv",
        description="Minimal C*-extensions of finite-dimensional operator systems: "
        "block structure, boundary ideals, tensor-pair and propagation checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    a = sub.add_parser("analyze", help="full single-system pipeline on one document")
    a.add_argument("path", help="system document (JSON)")
    _add_common(a)
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("tensor", help="the four pair checks on two documents")
    t.add_argument("left", help="left system document")
    t.add_argument("right", help="right system document")
    _add_common(t)
    t.set_defaults(func=cmd_tensor)

    c = sub.add_parser("corpus", help="write the standard example corpus")
    c.add_argument("out_dir", help="target directory")
    c.add_argument("--count", type=int, default=20, help="number of systems (default 20)")
    _add_common(c)
    c.set_defaults(func=cmd_corpus)

    v = sub.add_parser("verify-all", help="analyze every system and pair in a corpus")
    v.add_argument("corpus_dir", help="directory containing manifest.json")
    _add_common(v)
    v.set_defaults(func=cmd_verify_all)

    return parser


def _config_from(args) -> AnalysisConfig:
    overrides = _env_tol_defaults()
    for key in _TOL_FLAGS:
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    tol = DEFAULT_TOL.replace(**overrides) if overrides else DEFAULT_TOL
    if args.seed < 0:
        raise InputError(f"--seed must be non-negative, got {args.seed}")
    if args.falsifier_trials < 1 or args.uniqueness_trials < 1:
        raise InputError("trial counts must be positive")
    if args.max_ambient_product < 1:
        raise InputError("--max-ambient-product must be positive")
    return AnalysisConfig(
        seed=args.seed,
        tol=tol,
        uniqueness_trials=args.uniqueness_trials,
        falsifier_trials=args.falsifier_trials,
        max_ambient_product=args.max_ambient_product,
    )


def _fmt_blocks(blocks) -> str:
    return " ".join(f"({d},{m})" for d, m in blocks)


def _print_analysis(report: dict) -> None:
    agree = report["silov_killed"]["agreement"]
    print(
        f"{report['name']}: ambient {report['ambient_dim']}, "
        f"system dim {report['system_dim']}, algebra dim {report['algebra_dim']}"
    )
    print(f"  blocks: {_fmt_blocks(report['blocks'])}")
    print(f"  boundary reps: {report['boundary_reps']}")
    print(
        f"  silov killed: dk {report['silov_killed']['dk']} "
        f"lattice {report['silov_killed']['lattice']} "
        f"({'agree' if agree else 'DISAGREE'})"
    )
    if report["envelope_blocks"] is not None:
        prop = report["propagation"]
        print(
            f"  envelope blocks: {_fmt_blocks(report['envelope_blocks'])}; "
            f"propagation {prop['value']} chain {tuple(prop['chain'])}"
        )


def cmd_analyze(args) -> int:
    config = _config_from(args)
    t0 = time.perf_counter()
    spec = load_system(args.path)
    sa = analyze_system(
        opsys_of(spec, config.tol), config, name=spec.name, digest=spec_digest(spec)
    )
    report = analysis_report(sa)
    if args.json_out:
        atomic_write_text(args.json_out, dump_report(report))
    if not args.quiet:
        _print_analysis(report)
        print(f"analyzed in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0 if sa.agreement else 2


_CHECK_ORDER = (
    "envelope_tensor_factorization",
    "boundary_pair_closure",
    "power_compatibility",
    "propagation_max",
)


def _print_pair(report: dict) -> None:
    print(f"{report['left']['name']} (x) {report['right']['name']}:")
    fac = report["checks"]["envelope_tensor_factorization"]
    print(
        f"  product blocks: {_fmt_blocks(report['product_blocks'])}; "
        f"killed pairs {fac['product_killed_pairs']}"
    )
    pm = report["checks"]["propagation_max"]
    print(
        f"  propagation: left {pm['left']}, right {pm['right']}, "
        f"product {pm['product']} (expected {pm['expected']})"
    )
    for check in _CHECK_ORDER:
        verdict = "PASS" if report["checks"][check]["verified"] else "FAIL"
        print(f"  {check}: {verdict}")


def cmd_tensor(args) -> int:
    config = _config_from(args)
    t0 = time.perf_counter()
    left_spec = load_system(args.left)
    right_spec = load_system(args.right)
    left = analyze_system(
        opsys_of(left_spec, config.tol),
        config,
        name=left_spec.name,
        digest=spec_digest(left_spec),
    )
    right = analyze_system(
        opsys_of(right_spec, config.tol),
        config,
        name=right_spec.name,
        digest=spec_digest(right_spec),
    )
    pa = analyze_pair(left, right, config)
    report = pair_report(pa)
    if args.json_out:
        atomic_write_text(args.json_out, dump_report(report))
    if not args.quiet:
        _print_pair(report)
        print(f"verified in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0 if pa.verified else 2


def cmd_corpus(args) -> int:
    if args.count < 0:
        raise InputError(f"--count must be non-negative, got {args.count}")
    manifest = write_corpus(args.out_dir, seed=args.seed, count=args.count)
    if not args.quiet:
        print(
            f"wrote {len(manifest['systems'])} systems and manifest.json "
            f"to {args.out_dir}"
        )
    return 0


# verify-all workers return tagged outcomes instead of raising, so that the
# same code path works inline and through a process pool


def _safe_analyze(path_str: str, config: AnalysisConfig):
    try:
        spec = load_system(path_str)
        sa = analyze_system(
            opsys_of(spec, config.tol), config, name=spec.name, digest=spec_digest(spec)
        )
    except InputError as exc:
        return ("input", str(exc))
    except InconclusiveError as exc:
        return ("inconclusive", str(exc))
    except (VerificationError, StructuralError, DecompositionError) as exc:
        return ("failed", str(exc))
    if not sa.agreement:
        return ("disagree", sa)
    return ("ok", sa)


def _safe_pair(left: SystemAnalysis, right: SystemAnalysis, config: AnalysisConfig):
    try:
        pa = analyze_pair(left, right, config)
    except InputError as exc:
        return ("input", str(exc))
    except InconclusiveError as exc:
        return ("inconclusive", str(exc))
    except (
        VerificationError,
        StructuralError,
        DecompositionError,
        RouteDisagreementError,
    ) as exc:
        return ("failed", str(exc))
    return ("failed", pa) if not pa.verified else ("ok", pa)


def _run_tasks(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*tasks)))
    return [fn(*task) for task in tasks]


def cmd_verify_all(args) -> int:
    config = _config_from(args)
    if args.jobs < 1:
        raise InputError(f"--jobs must be positive, got {args.jobs}")
    t0 = time.perf_counter()
    corpus_dir = Path(args.corpus_dir)
    manifest = load_manifest(corpus_dir)
    out_dir = Path(args.json_out) if args.json_out else None

    sys_rows = []
    analyses: dict[str, SystemAnalysis] = {}
    entries = manifest["systems"]
    for entry in entries:
        if not isinstance(entry, dict) or "name" not in entry or "file" not in entry:
            raise InputError(f"{corpus_dir}/manifest.json: malformed system entry {entry!r}")
    outcomes = _run_tasks(
        _safe_analyze,
        [(str(corpus_dir / e["file"]), config) for e in entries],
        args.jobs,
    )
    for entry, (status, payload) in zip(entries, outcomes):
        row = {"name": entry["name"], "file": entry["file"], "status": status}
        if isinstance(payload, SystemAnalysis):
            analyses[entry["name"]] = payload
            report = analysis_report(payload)
            row["silov_killed"] = report["silov_killed"]
            row["propagation"] = (
                None if payload.prop is None else payload.prop.value
            )
            if out_dir is not None:
                atomic_write_text(
                    out_dir / f"{entry['name']}.analysis.json", dump_report(report)
                )
        else:
            row["detail"] = payload
        sys_rows.append(row)

    pair_rows = []
    pair_tasks = []
    pair_meta = []
    for left_name, right_name in manifest["pairs"]:
        row = {"left": left_name, "right": right_name}
        left = analyses.get(left_name)
        right = analyses.get(right_name)
        if left is None or right is None or not left.agreement or not right.agreement:
            row["status"] = "skipped"
            row["detail"] = "factor analysis unavailable"
            pair_rows.append(row)
            continue
        pair_meta.append(row)
        pair_tasks.append((left, right, config))
        pair_rows.append(row)
    pair_outcomes = _run_tasks(_safe_pair, pair_tasks, args.jobs)
    for row, (status, payload) in zip(pair_meta, pair_outcomes):
        row["status"] = status
        if isinstance(payload, PairAnalysis):
            report = pair_report(payload)
            row["passed"] = payload.verified
            row["checks"] = {c: report["checks"][c]["verified"] for c in _CHECK_ORDER}
            if out_dir is not None:
                atomic_write_text(
                    out_dir / f"{row['left']}__{row['right']}.tensor.json",
                    dump_report(report),
                )
        else:
            row["detail"] = payload

    statuses = [r["status"] for r in sys_rows] + [r["status"] for r in pair_rows]
    counts = {
        "input": statuses.count("input"),
        "failed": statuses.count("failed") + statuses.count("disagree"),
        "skipped": statuses.count("skipped"),
        "inconclusive": statuses.count("inconclusive"),
    }
    summary = {
        "schema": SCHEMA,
        "kind": "summary",
        "version": VERSION,
        "seed": config.seed,
        "tolerances": {
            "tol_rank": config.tol.tol_rank,
            "tol_psd": config.tol.tol_psd,
            "tol_herm": config.tol.tol_herm,
            "tol_ortho": config.tol.tol_ortho,
            "tol_sep": config.tol.tol_sep,
            "tol_norm": config.tol.tol_norm,
        },
        "flags": {
            "falsifier_trials": config.falsifier_trials,
            "uniqueness_trials": config.uniqueness_trials,
            "max_ambient_product": config.max_ambient_product,
        },
        "systems": sys_rows,
        "pairs": pair_rows,
        "failures": counts,
    }
    if out_dir is not None:
        atomic_write_text(out_dir / "summary.json", dump_report(summary))

    if not args.quiet:
        width = max((len(r["name"]) for r in sys_rows), default=4) + 2
        print(f"{'SYSTEM':<{width}}STATUS      SILOV      PROP")
        for r in sys_rows:
            silov = r.get("silov_killed", {}).get("lattice", "-")
            prop = r.get("propagation", "-")
            print(f"{r['name']:<{width}}{r['status']:<12}{str(silov):<11}{prop}")
            if "detail" in r:
                print(f"{'':<{width}}  {r['detail']}")
        pw = max((len(r["left"] + r["right"]) for r in pair_rows), default=8) + 7
        print(f"\n{'PAIR':<{pw}}STATUS      CHECKS")
        for r in pair_rows:
            label = f"{r['left']} (x) {r['right']}"
            checks = r.get("checks")
            summary_str = (
                "-" if checks is None else f"{sum(checks.values())}/{len(checks)}"
            )
            print(f"{label:<{pw}}{r['status']:<12}{summary_str}")
            if "detail" in r:
                print(f"{'':<{pw}}  {r['detail']}")
        print(f"verified corpus in {time.perf_counter() - t0:.1f}s", file=sys.stderr)

    if counts["input"]:
        return 1
    if counts["failed"] or counts["skipped"]:
        return 2
    if counts["inconclusive"]:
        return 3
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RouteDisagreementError, VerificationError, StructuralError, DecompositionError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
