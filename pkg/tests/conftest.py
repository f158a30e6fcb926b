import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from opcert.freealg import FreeAlgebra

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "opcert" / "fixtures"


@pytest.fixture
def werner_algebra():
    A = FreeAlgebra()
    for n in ("a", "a⁻", "b", "b⁻", "i"):
        A.add(n)
    return A


@pytest.fixture
def werner_system(werner_algebra):
    A = werner_algebra
    F = [A.parse(s) for s in (
        "a·a⁻·a - a",
        "b·b⁻·b - b",
        "b·b⁻·(i - a⁻·a) - i + a⁻·a",
        "a·i - a",
        "i·a⁻ - a⁻",
        "i·b - b",
        "b⁻·i - b⁻",
        "i·i - i",
    )]
    f = A.parse("a·b·b⁻·a⁻·a·b - a·b")
    return A, F, f


@pytest.fixture
def paired_algebra():
    A = FreeAlgebra()
    for n in ("a", "b", "c"):
        A.add_pair(n)
    return A
