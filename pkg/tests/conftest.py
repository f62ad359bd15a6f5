import json
from pathlib import Path

import pytest

from credgraph.graph import load_graph

# Acceptance criteria report lines collected across the session and printed
# in the terminal summary (see tests/test_acceptance.py).
ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[number] = ("PASS" if passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status} — {detail}")


def write_jsonl(path: Path, records) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


@pytest.fixture
def make_graph(tmp_path):
    """Build a SocialGraph from entity/edge dicts via the wire format."""

    def _make(entities, edges, name="g"):
        ents = write_jsonl(tmp_path / f"{name}_entities.jsonl", entities)
        edgs = write_jsonl(tmp_path / f"{name}_edges.jsonl", edges)
        return load_graph(ents, edgs)

    return _make
