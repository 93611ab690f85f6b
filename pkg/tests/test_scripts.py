import json
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"

CASES = [
    ("sign_traces.py", ["--n-max", "20", "--every", "5"]),
    ("rademacher_split.py", ["--K", "6", "--n-max", "4"]),
    ("moving_atom.py", ["--cap", "10", "--n-max", "10"]),
    ("blackwell_suite.py", ["--trials", "20"]),
    ("prohorov_vs_w1.py", ["--trials", "20"]),
]


@pytest.mark.parametrize("script, args", CASES)
def test_script_runs(tmp_path, script, args):
    out = tmp_path / "result.json"
    proc = subprocess.run([sys.executable, str(SCRIPTS / script), *args, "--out", str(out)],
                          capture_output=True, text=True, cwd=SCRIPTS, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())
