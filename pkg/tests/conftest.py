import json
from pathlib import Path

import pytest

from regtsp import read_graph

CORPUS = Path(__file__).resolve().parents[1] / "instances"


def corpus_entries():
    """All stored instances with their oracle reports, sorted by path."""
    out = []
    for path in sorted(CORPUS.glob("*/*.graph")):
        report_path = path.with_suffix("").with_suffix(".oracle.json")
        report = None
        if report_path.exists():
            with open(report_path, encoding="utf-8") as fh:
                report = json.load(fh)
        out.append((path, report))
    return out


@pytest.fixture(scope="session")
def corpus():
    entries = corpus_entries()
    assert entries, f"instance corpus missing at {CORPUS}"
    return [(path, read_graph(path), report) for path, report in entries]
