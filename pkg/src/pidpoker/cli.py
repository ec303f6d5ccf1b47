"""Command-line interface: parse, simulate, analyze, decompose, report.

Exit codes: 0 success, 1 unreadable or invalid input, 2 parse failure
fraction above ``--fail-threshold``.  ``PIDPOKER_*`` environment variables
set defaults for the shared flags; explicit flags win.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from . import __version__
from .handparse import SchemaError, parse_stream, read_records, write_records
from .infodecomp import SPECIFIC_FIELDS, InfoDecompError, JointDistribution3, decompose, specific_decompose
from .pipeline.analysis import AnalysisConfig, report_from_json, run_analysis
from .pipeline.observations import Variant

log = logging.getLogger("pidpoker")

ENV_PREFIX = "PIDPOKER_"
DEFAULT_FAIL_THRESHOLD = 0.10


class UsageError(Exception):
    """Bad input or configuration; maps to exit code 1."""


def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


def _levels(text: str | None):
    if text is None or text == "":
        return None
    if text.strip().lower() == "all":
        return "all"
    try:
        return tuple(int(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be integers (cents), got {text!r}") from None


def _fraction(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("fraction must lie in [0, 1]")
    return v


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _meta(command: str, config: dict) -> dict:
    return {"tool": "pidpoker", "version": __version__, "command": command, "config": config}


# -- subcommands -------------------------------------------------------------


def cmd_parse(args) -> int:
    threshold = args.fail_threshold
    if threshold is None:
        threshold = float(_env("FAIL_THRESHOLD", DEFAULT_FAIL_THRESHOLD))
    out = Path(args.out or _env("OUT", "."))
    text = "\n\n".join(_read_text(p) for p in args.inputs)
    records, report = parse_stream(text, workers=args.workers)
    config = {"inputs": list(args.inputs), "fail_threshold": threshold, "workers": args.workers}
    buf = io.StringIO()
    write_records(records, buf, meta=_meta("parse", config))
    atomic_write(out / "hands.jsonl", buf.getvalue())
    doc = {**_meta("parse", config), "report": report.to_dict()}
    atomic_write(out / "parse_report.json", json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    print(f"parsed {report.parsed}/{report.attempted} hands (failure fraction {report.failure_fraction:.4f})")
    for reason, n in report.reason_counts().items():
        print(f"  {reason}: {n}")
    return 2 if report.failure_fraction > threshold else 0


def _unwrap_config(doc):
    # accept a bare config or a sim_config.json written by this tool
    if isinstance(doc, dict) and doc.get("tool") == "pidpoker" and isinstance(doc.get("config"), dict):
        return doc["config"]
    if not isinstance(doc, dict):
        raise ValueError("config must be a JSON object")
    return doc


def cmd_simulate(args) -> int:
    from .synthgen import SimConfig, render_session, simulate_session, write_labels

    try:
        cfg = SimConfig.from_dict(_unwrap_config(json.loads(_read_text(args.config)))) if args.config else SimConfig()
        overrides = {}
        if args.hands is not None:
            overrides["hands"] = args.hands
        seed = args.seed if args.seed is not None else _env("SEED")
        if seed is not None:
            overrides["seed"] = int(seed)
        if overrides:
            cfg = SimConfig.from_dict({**cfg.to_dict(), **overrides})
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid simulation config: {exc}") from None
    out = Path(args.out or _env("OUT", "."))
    records = simulate_session(cfg, workers=args.workers)
    text = render_session(records)
    atomic_write(out / "hands.txt", text + ("\n" if text else ""))
    buf = io.StringIO()
    write_records(records, buf, meta=_meta("simulate", cfg.to_dict()))
    atomic_write(out / "hands.jsonl", buf.getvalue())
    doc = _meta("simulate", cfg.to_dict())
    atomic_write(out / "sim_config.json", json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    write_labels(cfg, out / "labels.json")
    print(f"simulated {len(records)} hands into {out}")
    return 0


def _analysis_config(args) -> AnalysisConfig:
    variant = args.variant or _env("VARIANT", Variant.MAIN.value)
    resamples = args.resamples if args.resamples is not None else int(_env("RESAMPLES", 500))
    seed = args.seed if args.seed is not None else int(_env("SEED", 0))
    levels = args.levels if args.levels is not None else _levels(_env("LEVELS"))
    kwargs = {}
    if levels is not None:
        kwargs["levels"] = None if levels == "all" else levels
    try:
        return AnalysisConfig(
            variant=Variant(variant),
            resamples=resamples,
            seed=seed,
            bootstrap_unit=args.bootstrap_unit,
            wager_cutoffs=args.wager_cutoffs,
            strength_cutoffs=args.strength_cutoffs,
            **kwargs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_analyze(args) -> int:
    config = _analysis_config(args)
    text = _read_text(args.records)
    try:
        records = list(read_records(text.splitlines(keepends=True)))
    except SchemaError as exc:
        raise UsageError(f"{args.records}: {exc}") from None
    labels = None
    if args.labels:
        from .synthgen import read_labels

        try:
            labels = read_labels(args.labels)
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad labels file {args.labels}: {exc}") from None
    report = run_analysis(records, config, labels=labels)
    out = Path(args.out or _env("OUT", "."))
    atomic_write(out / "report.json", report.to_json())
    atomic_write(out / "report.csv", report.to_csv())
    print(f"analyzed {len(records)} hands: {len(report.cells)} cells, {len(report.absent)} absent")
    return 0


def _f6(v: float) -> str:
    # avoid printing "-0.000000" for round-off
    return f"{0.0 if abs(v) < 5e-7 else v:.6f}"


def format_decomposition(dist: JointDistribution3) -> str:
    pd = decompose(dist)
    sd = specific_decompose(dist)
    lines = [
        f"total            {_f6(pd.total)}",
        f"redundancy       {_f6(pd.redundancy)}",
        f"unique_y1        {_f6(pd.unique_y1)}",
        f"unique_y2        {_f6(pd.unique_y2)}",
        f"synergy          {_f6(pd.synergy)}",
        f"mi_y1            {_f6(pd.mi_y1)}",
        f"mi_y2            {_f6(pd.mi_y2)}",
        f"interaction_info {_f6(pd.interaction_info)}",
        "",
        "state  weight    " + "  ".join(f"{n.removeprefix('specific_'):>10}" for n in SPECIFIC_FIELDS),
    ]
    for x in sd.states:
        row = sd.for_state(x)
        lines.append(f"{x:<6} {_f6(row['weight'])}  " + "  ".join(f"{_f6(row[n]):>10}" for n in SPECIFIC_FIELDS))
    return "\n".join(lines)


def cmd_decompose(args) -> int:
    text = _read_text(args.distribution)
    try:
        dist = JointDistribution3.from_text(text)
    except (InfoDecompError, ValueError) as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}") from None
    print(format_decomposition(dist))
    return 0


_REPORT_MEASURES = ("entropy_w1", "total", "normalized_total", "redundancy", "unique_p1", "unique_w2", "synergy")


def cmd_report(args) -> int:
    try:
        doc = report_from_json(_read_text(args.report))
    except ValueError as exc:
        raise UsageError(f"{args.report}: {exc}") from None
    print(f"pidpoker {doc['version']} report, variant {doc['config']['variant']}, {doc['config']['resamples']} resamples")
    for cell in doc["cells"]:
        print(f"\nlevel {cell['level']} {cell['skill_class']}: {cell['n_observations']} observations, {cell['n_hands']} hands")
        scalars = {e["measure"]: e for e in cell["estimates"] if e["state"] == ""}
        for m in _REPORT_MEASURES:
            e = scalars.get(m)
            if e is None or e["estimate"] is None:
                continue
            lo = "nan" if e["ci_low"] is None else f"{e['ci_low']:.4f}"
            hi = "nan" if e["ci_high"] is None else f"{e['ci_high']:.4f}"
            print(f"  {m:<17} {e['estimate']:.4f}  [{lo}, {hi}]")
    for a in doc["absent"]:
        print(f"\nlevel {a['level']} {a['skill_class']}: absent")
    return 0


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pidpoker", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pidpoker {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="raw hand histories to normalized records")
    sp.add_argument("inputs", nargs="+", help="raw text files ('-' for stdin)")
    sp.add_argument("--out", help="output directory (hands.jsonl, parse_report.json)")
    sp.add_argument("--fail-threshold", type=_fraction, default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_parse)

    ss = sub.add_parser("simulate", help="synthetic corpus from agent policies")
    ss.add_argument("--config", help="JSON simulation config")
    ss.add_argument("--hands", type=int)
    ss.add_argument("--seed", type=int)
    ss.add_argument("--out", help="output directory")
    ss.add_argument("--workers", type=int, default=None)
    ss.set_defaults(func=cmd_simulate)

    sa = sub.add_parser("analyze", help="decompositions per level and skill class")
    sa.add_argument("records", help="normalized records (hands.jsonl)")
    sa.add_argument("--variant", choices=[v.value for v in Variant])
    sa.add_argument("--resamples", type=int)
    sa.add_argument("--seed", type=int)
    sa.add_argument("--levels", type=_levels, help="blind levels in cents, e.g. '25,50' or 'all'")
    sa.add_argument("--labels", help="JSON player -> Shark/Fish/Other override")
    sa.add_argument("--bootstrap-unit", choices=["hand", "round"], default="hand")
    sa.add_argument("--wager-cutoffs", choices=["blind", "fitted"], default="blind")
    sa.add_argument("--strength-cutoffs", choices=["fitted", "reference"], default="fitted")
    sa.add_argument("--out", help="output directory (report.json, report.csv)")
    sa.set_defaults(func=cmd_analyze)

    sd = sub.add_parser("decompose", help="decompose a distribution file")
    sd.add_argument("distribution", help="exchange-format distribution ('-' for stdin)")
    sd.set_defaults(func=cmd_decompose)

    sr = sub.add_parser("report", help="summarize an analysis report")
    sr.add_argument("report", help="report.json")
    sr.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
