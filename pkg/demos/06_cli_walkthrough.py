"""End-to-end CLI walkthrough on a shipped scenario file.

Classifies the regime, runs the full verification, and peeks into the
machine-readable artifacts.  Identical seeds give byte-identical outputs,
which the last step demonstrates.
"""

import json
import pathlib
import shutil
import subprocess
import sys

HERE = pathlib.Path(__file__).parent
SCENARIO = HERE / "scenarios" / "baseline_short.toml"


def run(*args):
    cmd = [sys.executable, "-m", "levymut.cli", *args]
    print(f"\n$ {' '.join(str(a) for a in cmd[2:])}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout.rstrip())
    if proc.returncode not in (0, 1):
        print(proc.stderr.rstrip())
        raise SystemExit(proc.returncode)
    return proc


run("classify", "--scenario", str(SCENARIO))

out = HERE / "cli_output"
shutil.rmtree(out, ignore_errors=True)
run("verify", "--scenario", str(SCENARIO), "--out-dir", str(out))

report = json.loads((out / "report.json").read_text())
print("\nchecks in report.json:")
for check in report["checks"]:
    print(f"  {check['name']}: passed={check['passed']}")
print("noise penalty envelopes:", report["envelopes"]["beta1"])

again = HERE / "cli_output_again"
shutil.rmtree(again, ignore_errors=True)
run("verify", "--scenario", str(SCENARIO), "--out-dir", str(again),
    "--threads", "4")

same = all(
    (out / f.name).read_bytes() == f.read_bytes()
    for f in again.iterdir()
    if f.is_file()
)
print(f"\nbyte-identical artifacts across runs and thread counts: {same}")
