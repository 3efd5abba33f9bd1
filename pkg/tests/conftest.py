import json
from pathlib import Path

import pytest

from lmstab.polyring import QQ, PrimeField, Ring, parse_hpoly

FIXTURES = json.loads((Path(__file__).parent / "oracles" / "fixtures.json").read_text())

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def fixtures():
    return FIXTURES


@pytest.fixture
def R3():
    return Ring(3, PrimeField())


@pytest.fixture
def R3Q():
    return Ring(3, QQ)


def P(text, ring):
    return parse_hpoly(text, ring.nvars, ring.field)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        tr.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
