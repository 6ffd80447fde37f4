"""End-to-end acceptance gate.

Each criterion is one test that prints a single PASS/FAIL line with the
measured evidence, then asserts.  Run order follows file order.
"""
import glob
import json
import re
import subprocess
import sys
import time
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
CLI = [sys.executable, "-m", "obtt.cli"]
BASES = ("terminal", "arrow", "span")


def cli(*args):
    start = time.perf_counter()
    res = subprocess.run(
        CLI + list(args), capture_output=True, text=True, cwd=ROOT
    )
    return res, time.perf_counter() - start


_reports = {}


def verify_report(config, base, *extra):
    """Run model-verify once per distinct argument tuple and cache it."""
    key = (config, base, extra)
    if key not in _reports:
        res, wall = cli(
            "model-verify", "--config", config, "--base", base, *extra
        )
        if res.returncode != 0:
            raise AssertionError(
                f"model-verify {base} failed: {res.stderr[-400:]}"
            )
        _reports[key] = (json.loads(res.stdout), wall)
    return _reports[key]


def announce(capsys, number, ok, detail):
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"\n[acceptance] criterion {number}: {status} ({detail})")
    assert ok, detail


def test_criterion_1_surface_corpus(capsys):
    well = sorted(glob.glob(str(ROOT / "corpus/well_typed/*.obtt")))
    ill = sorted(glob.glob(str(ROOT / "corpus/ill_typed/*.obtt")))
    problems = []
    if len(well) < 20:
        problems.append(f"only {len(well)} well-typed files")
    if len(ill) < 10:
        problems.append(f"only {len(ill)} ill-typed files")
    for needed in ("12_pi_transport", "07_lift_bool", "08_lift_unit",
                   "09_lift_universe", "10_lift_pi", "11_lift_sigma",
                   "06_decode_lift_generic"):
        if not any(needed in p for p in well):
            problems.append(f"missing well-typed case {needed}")
    for needed in ("01_universe_in_itself", "02_pifst_on_bool"):
        if not any(needed in p for p in ill):
            problems.append(f"missing ill-typed case {needed}")

    res_w, wall_w = cli("check", *well)
    if res_w.returncode != 0:
        problems.append(f"well-typed corpus rejected: {res_w.stderr[-200:]}")
    elif res_w.stdout.count(": ok (") != len(well):
        problems.append("missing per-file ok lines")

    res_i, wall_i = cli("check", *ill)
    if res_i.returncode != 1:
        problems.append(f"ill-typed corpus exit {res_i.returncode}")
    if ": ok (" in res_i.stdout:
        problems.append("an ill-typed file was accepted")
    for path in ill:
        if Path(path).name not in res_i.stderr:
            problems.append(f"no error reported for {Path(path).name}")
    wall = wall_w + wall_i
    if wall >= 5.0:
        problems.append(f"corpus batch took {wall:.2f}s")
    announce(capsys, 1, not problems,
             "; ".join(problems) or
             f"{len(well)} well-typed + {len(ill)} ill-typed in {wall:.2f}s")


def test_criterion_2_generated_code_suite(capsys):
    import test_kernel

    try:
        counts = test_kernel.run_code_property_suite(1000, seed=20260822)
    except AssertionError as err:
        announce(capsys, 2, False, f"property violated: {err}")
        return
    ok = (counts["codes"] >= 1000 and counts["decode"] >= 1000
          and counts["lift_nf"] >= 1000 and counts["irrelevance"] >= 1000
          and counts["injectivity"] >= 100)
    announce(
        capsys, 2, ok,
        f"{counts['codes']} codes: {counts['decode']} decode equations, "
        f"{counts['lift_nf']} lift normal forms, "
        f"{counts['injectivity']} injectivity decompositions, "
        f"{counts['irrelevance']} irrelevance checks, 0 failures",
    )


def test_criterion_3_model_verification(capsys):
    problems = []
    wall_total = 0.0
    fibers_total = 0
    for base in BASES:
        report, wall = verify_report("configs/strict.json", base)
        wall_total += wall
        if report["summary"]["failures"]:
            problems.append(f"{base}: {report['summary']['failures']} failures")
        checks = {rec["check"] for rec in report["records"]}
        if "genericity" not in checks:
            problems.append(f"{base}: no genericity record")
        crossed = 0
        for rec in report["records"]:
            if rec["check"] != "decode_fn":
                continue
            match = re.search(r"oracle cross-checked (\d+)", rec["note"] or "")
            if match:
                crossed += int(match.group(1))
        if crossed == 0:
            problems.append(f"{base}: no section fibers cross-checked")
        fibers_total += crossed
    for base in BASES:
        report, wall = verify_report("configs/lift.json", base, "--checks", "lift")
        wall_total += wall
        recs = [r for r in report["records"] if r["check"] == "lift"]
        if not any(r["level"] == "0->2" and r["status"] == "pass" for r in recs):
            problems.append(f"{base}: no passing two-step lift record")
        if any("functoriality skipped" in (r["note"] or "") for r in recs):
            problems.append(f"{base}: functoriality skipped with three bounds")
    if wall_total >= 120.0:
        problems.append(f"runs took {wall_total:.1f}s")
    announce(capsys, 3, not problems,
             "; ".join(problems) or
             f"3 bases strict + 3 two-step lift runs, "
             f"{fibers_total} section fibers oracle-checked, "
             f"{wall_total:.1f}s")


def test_criterion_4_non_injectivity_witnesses(capsys):
    problems = []
    found = 0
    for base in BASES:
        report, _ = verify_report("configs/strict.json", base)
        wits = [
            rec for rec in report["records"]
            if rec["check"] == "non_injectivity_witness" and rec["witness"]
            and rec["witness"]["kind"] == "host_non_injectivity"
        ]
        if not wits:
            problems.append(f"{base}: no witness record")
        found += len(wits)
        for rec in wits:
            if rec["witness"]["body0"] == rec["witness"]["body1"]:
                problems.append(f"{base}: witness bodies coincide")
    announce(capsys, 4, not problems,
             "; ".join(problems) or
             f"{found} witnesses across {len(BASES)} bases")


def test_criterion_5_weak_mode(capsys):
    problems = []
    iso_pairs = []
    for base in BASES:
        report, _ = verify_report("configs/weak.json", base)
        if report["summary"]["failures"]:
            problems.append(f"{base}: {report['summary']['failures']} failures")
        for rec in report["records"]:
            wit = rec["witness"]
            if wit and wit["kind"] == "weak_host_fn_differs":
                if not wit["isomorphic"]:
                    problems.append(f"{base}: recorded pair not isomorphic")
                iso_pairs.append((base, rec["stage"], rec["level"]))
    if not iso_pairs:
        problems.append("no differs-but-isomorphic pair recorded")
    announce(capsys, 5, not problems,
             "; ".join(problems) or
             f"all weak runs pass; {len(iso_pairs)} isomorphic-but-distinct "
             f"function spaces recorded")


def test_criterion_6_deterministic_reports(capsys, tmp_path):
    def run_to_file(name, *extra):
        out = tmp_path / name
        res, _ = cli(
            "model-verify", "--config", "configs/strict.json",
            "--base", "terminal", "--report", str(out), *extra
        )
        assert res.returncode == 0, res.stderr
        return out.read_bytes()

    problems = []
    first = run_to_file("a.json")
    second = run_to_file("b.json")
    if first != second:
        problems.append("reruns differ")
    parallel = run_to_file("c.json", "--jobs", "4")
    if first != parallel:
        problems.append("jobs=4 differs from jobs=1")
    announce(capsys, 6, not problems,
             "; ".join(problems) or
             "rerun and jobs=4 reports byte-identical")
