"""Command-line driver: check, normalize, model-verify.

Exit codes are a stable contract: 0 success, 1 semantic failure (type
errors, failed checks), 2 usage or I/O problems.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import config as cfgmod
from . import report as repmod
from .config import Config, ConfigError
from .kernel import CheckError, DEFAULT_MAX_LEVEL, check_file, quote
from .model import fincat
from .model.checks import (
    check_decode_fn,
    check_genericity,
    check_lift,
    check_naturality,
    check_retraction,
    witness_non_injectivity,
)
from .model.fincat import CategoryError
from .model.host import PresheafHost
from .syntax import ParseError, parse_file, print_term


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obtt",
        description="observational type theory kernel and presheaf-model verifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="type-check .obtt files")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    p_check.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL)

    p_norm = sub.add_parser("normalize", help="print a definition's normal form")
    p_norm.add_argument("file", metavar="FILE")
    p_norm.add_argument("name", metavar="NAME")
    p_norm.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL)

    p_model = sub.add_parser("model-verify", help="run the model check suite")
    p_model.add_argument("--config", metavar="PATH")
    p_model.add_argument("--mode", choices=cfgmod.MODES)
    p_model.add_argument("--depth", type=int)
    p_model.add_argument("--seed", type=int)
    p_model.add_argument("--base", metavar="PATH")
    p_model.add_argument("--jobs", type=int, default=1)
    p_model.add_argument("--report", metavar="PATH")
    p_model.add_argument("--csv", metavar="PATH")
    p_model.add_argument("--figures", metavar="DIR")
    p_model.add_argument(
        "--checks",
        metavar="NAMES",
        help="comma-separated subset of checks to run (default: all)",
    )
    return parser


def _load_source(path: str):
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def cmd_check(args) -> int:
    worst = 0
    for path in args.files:
        try:
            text = _load_source(path)
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            worst = max(worst, 2)
            continue
        try:
            source = parse_file(text)
            check_file(source, max_level=args.max_level)
        except (ParseError, CheckError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            worst = max(worst, 1)
            continue
        print(f"{path}: ok ({len(source.decls)} declarations)")
    return worst


def cmd_normalize(args) -> int:
    try:
        text = _load_source(args.file)
    except OSError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return 2
    try:
        source = parse_file(text)
        globs = check_file(source, max_level=args.max_level)
    except (ParseError, CheckError) as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return 1
    entry = globs.get(args.name)
    if entry is None:
        print(f"{args.file}: no definition named {args.name!r}", file=sys.stderr)
        return 1
    print(print_term(quote(0, entry.value)))
    print(f": {print_term(quote(0, entry.ty))}")
    return 0


def _merged_config(args) -> Config:
    cfg = cfgmod.load_config(args.config)
    updates = {}
    if args.mode is not None:
        updates["mode"] = args.mode
    if args.depth is not None:
        updates["depth"] = args.depth
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.base is not None:
        updates["base"] = args.base
    if updates:
        cfg = dataclasses.replace(cfg, **updates).validate()
    return cfg


def _build_host(cfg: Config, cat) -> PresheafHost:
    return PresheafHost(
        cat,
        cfg.bounds,
        strict_fn=cfg.mode == "strict",
        uni_code_depth=cfg.uni_code_depth,
        caps=cfg.caps,
    )


def _task_list(cfg: Config) -> list[tuple[str, int]]:
    levels = range(len(cfg.bounds))
    tasks: list[tuple[str, int]] = []
    tasks += [("retraction", lv) for lv in levels]
    tasks += [("decode_fn", lv) for lv in levels]
    tasks += [("naturality", lv) for lv in levels]
    tasks.append(("lift", 0))
    tasks += [("non_injectivity_witness", lv) for lv in levels]
    tasks.append(("genericity", 0))
    return tasks


def _dispatch(host: PresheafHost, cfg: Config, name: str, level: int):
    if name == "retraction":
        return check_retraction(host, level)
    if name == "decode_fn":
        return check_decode_fn(host, level, cfg.depth)
    if name == "naturality":
        return check_naturality(host, level, cfg.depth)
    if name == "lift":
        return check_lift(host, level, cfg.depth)
    if name == "non_injectivity_witness":
        return witness_non_injectivity(host, level)
    if name == "genericity":
        return check_genericity(host, level, cfg.genericity_family_bound)
    raise ValueError(f"unknown check {name}")


def _run_task(config_data: dict, name: str, level: int):
    # worker entry: rebuild everything so tasks pickle as plain data
    cfg = cfgmod.config_from_dict(config_data)
    cat = cfg.load_base()
    host = _build_host(cfg, cat)
    return _dispatch(host, cfg, name, level)


def _warn_bound_growth(host: PresheafHost, cfg: Config) -> None:
    # a level's stage sets should fit inside the next level's bound
    for lv in range(len(cfg.bounds) - 1):
        for stage in host.stages():
            try:
                count = len(host.elements(lv, stage))
            except Exception:
                return
            if count > cfg.bounds[lv + 1]:
                print(
                    f"warning: stage set at level {lv}, stage {stage} has "
                    f"{count} elements, above the level-{lv + 1} bound "
                    f"{cfg.bounds[lv + 1]}",
                    file=sys.stderr,
                )


def cmd_model_verify(args) -> int:
    start = time.monotonic()
    try:
        cfg = _merged_config(args)
        cat = cfg.load_base()
    except (ConfigError, CategoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    tasks = _task_list(cfg)
    if args.checks:
        wanted = set(args.checks.split(","))
        known = {name for name, _ in tasks}
        unknown = wanted - known
        if unknown:
            print(f"error: unknown checks {sorted(unknown)}", file=sys.stderr)
            return 2
        tasks = [(name, lv) for name, lv in tasks if name in wanted]
    records = []
    if args.jobs > 1:
        echo = cfg.echo()
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_task, echo, name, lv) for name, lv in tasks]
            for future in futures:
                records.extend(future.result())
    else:
        host = _build_host(cfg, cat)
        _warn_bound_growth(host, cfg)
        for name, lv in tasks:
            records.extend(_dispatch(host, cfg, name, lv))
    report = repmod.make_report(cfg.echo(), fincat.to_json(cat), records)
    text = repmod.report_json(report)
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8") as handle:
                handle.write(repmod.report_csv(report))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if args.figures:
        from .plots import render_report_figures

        for path in render_report_figures(report, args.figures):
            print(f"wrote {path}", file=sys.stderr)
    wall = time.monotonic() - start
    sys.stderr.write(repmod.human_summary(report, wall))
    return 0 if report["summary"]["failures"] == 0 else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "normalize":
        return cmd_normalize(args)
    return cmd_model_verify(args)


if __name__ == "__main__":
    sys.exit(main())
