"""The sixteen acceptance criteria, each at its stated tolerance.

Every criterion runs through the same battery the CLI uses; one line per
criterion is printed in the terminal summary.  Determinism is checked twice:
in-process (criterion C16) and through the CLI at 1 and 8 threads.
"""
import filecmp
import os
import subprocess
import sys

import pytest

from lagvar.harness import battery
from lagvar.harness.config import from_mapping

CONFIGS = {
    "n1": from_mapping({}),
    "n2": from_mapping({"n": 2, "alpha": [0.0, 1.0]}),
}
TITLES = {cid: title for cid, _, title, _ in battery.CRITERIA}


@pytest.mark.parametrize("label", sorted(CONFIGS))
@pytest.mark.parametrize("cid", [c[0] for c in battery.CRITERIA])
def test_criterion(cid, label, criterion_lines):
    rows = battery.run_criterion(cid, CONFIGS[label])
    failed = [r for r in rows if not r.passed]
    status = "PASS" if rows and not failed else "FAIL"
    criterion_lines.append(f"{cid} [{label}] {status} {TITLES[cid]} ({len(rows)} rows, {len(failed)} failed)")
    print(criterion_lines[-1])
    for r in failed:
        print("   ", r.fields())
    assert rows, "criterion produced no rows"
    assert not failed, [r.fields() for r in failed]


def _verify(out, threads):
    cmd = [sys.executable, "-m", "lagvar", "verify", "--out", str(out), "--threads", str(threads), "--seed", "7"]
    return subprocess.run(cmd, capture_output=True, text=True, check=False)


def test_cli_outputs_identical_across_thread_counts(tmp_path, criterion_lines):
    runs = {t: _verify(tmp_path / f"t{t}", t) for t in (1, 8)}
    for t, proc in runs.items():
        assert proc.returncode == 0, proc.stdout + proc.stderr
    names = sorted(f for f in os.listdir(tmp_path / "t1") if f != "timings.csv")
    assert names == sorted(f for f in os.listdir(tmp_path / "t8") if f != "timings.csv")
    assert "summary.csv" in names and len(names) == len(battery.SUITES) + 1
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "t1", tmp_path / "t8", names, shallow=False)
    criterion_lines.append(f"C16 [cli] {'PASS' if not (mismatch or errors) else 'FAIL'} "
                           f"verify at 1 vs 8 threads byte-identical ({len(match)} files)")
    assert not mismatch and not errors
