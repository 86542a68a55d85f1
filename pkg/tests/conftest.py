import functools
from pathlib import Path

import pytest
from gmpy2 import mpq

from plqconj import plqmodel
from plqconj.core import LinFn, QuadFn
from plqconj.geometry import hull_and_orient
from plqconj.maxconj import conjugate_plq

DATA = Path(__file__).resolve().parent.parent / "data"

CORPUS = sorted(p.stem for p in DATA.glob("*.json"))

XY = QuadFn(0, 1, 0)
HEXAGON = [(-5, -4), (0, -4), (2, 0), (2, 1), (1, 3), (-5, 5)]


def poly(*pts):
    return hull_and_orient(pts)


@functools.lru_cache(maxsize=None)
def instance(name):
    return plqmodel.load(DATA / f"{name}.json")


@functools.lru_cache(maxsize=None)
def conjugate(name):
    return conjugate_plq(instance(name))


def lin(a, b, c):
    return LinFn(mpq(a), mpq(b), mpq(c))


# acceptance lines, printed in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture
def data_dir():
    return DATA
