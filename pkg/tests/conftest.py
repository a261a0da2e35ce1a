import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

GOLDEN_DIR = Path(__file__).parent / "golden"

# (criterion, passed, detail) lines collected by test_acceptance
ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--update-golden", action="store_true", default=False,
                     help="rewrite recorded golden hashes instead of comparing")


@pytest.fixture
def update_golden(request):
    return request.config.getoption("--update-golden")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def tree_digests(directory, skip=("config.txt",)) -> dict:
    """sha256 of every file under ``directory``, keyed by relative path.

    The config echo is skipped by default: it records input paths, which
    differ between checkouts.
    """
    import hashlib
    root = Path(directory)
    return {p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file() and p.name not in skip}


def compare_golden(name: str, digests: dict, update: bool) -> list[str]:
    """Compare against ``golden/<name>.json``; returns mismatch descriptions.

    With ``--update-golden`` the file is rewritten and nothing is reported.
    """
    import json
    path = GOLDEN_DIR / f"{name}.json"
    if update:
        GOLDEN_DIR.mkdir(exist_ok=True)
        path.write_text(json.dumps(digests, indent=2, sort_keys=True) + "\n")
        return []
    if not path.exists():
        return [f"no golden record {path.name}; run pytest --update-golden once"]
    recorded = json.loads(path.read_text())
    problems = [f"{k}: missing" for k in recorded if k not in digests]
    problems += [f"{k}: unexpected file" for k in digests if k not in recorded]
    problems += [f"{k}: hash changed" for k in recorded if k in digests and digests[k] != recorded[k]]
    return problems
