"""Deterministic report assembly.

The JSON report is a pure function of config and inputs: records are
sorted on a canonical key and serialization is key-sorted with fixed
indentation, so identical runs produce identical bytes.  Wall-clock
time goes only to the human summary on stderr for that reason.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json

from . import __version__
from .model.checks import CheckRecord

CHECK_ORDER = {
    name: i
    for i, name in enumerate(
        [
            "retraction",
            "decode_fn",
            "naturality",
            "lift",
            "non_injectivity_witness",
            "genericity",
        ]
    )
}


def inputs_digest(config_echo: dict, base_json: dict) -> str:
    blob = json.dumps(
        {"config": config_echo, "base": base_json}, sort_keys=True
    ).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def sort_records(records: list[CheckRecord]) -> list[CheckRecord]:
    return sorted(
        records,
        key=lambda r: (CHECK_ORDER.get(r.check, 99), r.level, r.stage),
    )


def make_report(config_echo: dict, base_json: dict, records: list[CheckRecord]) -> dict:
    ordered = sort_records(records)
    digest = inputs_digest(config_echo, base_json)
    rows = []
    for rec in ordered:
        row = rec.to_json()
        row["inputs_digest"] = digest
        rows.append(row)
    return {
        "version": __version__,
        "config": config_echo,
        "base": base_json,
        "inputs_digest": digest,
        "universe_code_depth": config_echo["uni_code_depth"],
        "records": rows,
        "summary": {
            "checks": len(rows),
            "failures": sum(r["failure_count"] for r in rows),
            "capped": sum(1 for r in rows if r["capped"]),
        },
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_csv(report: dict) -> str:
    """The per-record table as comma-delimited text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["check", "level", "stage", "status", "checked", "failure_count", "capped"]
    )
    for row in report["records"]:
        writer.writerow(
            [
                row["check"],
                row["level"],
                row["stage"],
                row["status"],
                row["checked"],
                row["failure_count"],
                str(row["capped"]).lower(),
            ]
        )
    return buf.getvalue()


def human_summary(report: dict, wall_seconds: float) -> str:
    lines = []
    summary = report["summary"]
    verdict = "PASS" if summary["failures"] == 0 else "FAIL"
    lines.append(
        f"{verdict}: {summary['checks']} check records, "
        f"{summary['failures']} failures, {summary['capped']} capped "
        f"({wall_seconds:.2f}s)"
    )
    for row in report["records"]:
        flag = " [capped]" if row["capped"] else ""
        lines.append(
            f"  {row['status']:4} {row['check']:24} level {row['level']:5} "
            f"stage {row['stage']:8} checked {row['checked']}{flag}"
        )
    return "\n".join(lines) + "\n"
