"""Shared fixtures and the acceptance-criteria summary.

Tests marked ``@pytest.mark.acceptance(n, "title")`` are grouped by
criterion; after the run one PASS/FAIL line per criterion is printed.
"""

from __future__ import annotations

import math
from collections import OrderedDict

import numpy as np
import pytest

from ricci_forge import models

_ACCEPTANCE: "OrderedDict[int, dict]" = OrderedDict()


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is None:
            continue
        number, title = mark.args
        entry = _ACCEPTANCE.setdefault(number, {"title": title, "outcomes": {}})
        entry["outcomes"][item.nodeid] = None
    for k in sorted(_ACCEPTANCE):
        _ACCEPTANCE.move_to_end(k)


def pytest_runtest_logreport(report):
    for entry in _ACCEPTANCE.values():
        if report.nodeid in entry["outcomes"]:
            if report.when == "call" or (report.when == "setup" and not report.passed):
                entry["outcomes"][report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, entry in _ACCEPTANCE.items():
        outcomes = list(entry["outcomes"].values())
        if any(o is None for o in outcomes):
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        failed = [nid.split("::")[-1] for nid, o in entry["outcomes"].items() if o not in ("passed", None)]
        detail = f"  (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {number:2d} [{status}] {entry['title']}{detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ex1():
    return models.builtin("example1")


@pytest.fixture(scope="session")
def ex2():
    return models.builtin("example2")


@pytest.fixture(scope="session")
def ex3():
    return models.builtin("example3")


QUARTER = math.pi / 4
