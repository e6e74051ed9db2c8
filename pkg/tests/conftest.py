from fractions import Fraction

import pytest
from hypothesis import settings

from vermatheta import BOREL, PARABOLIC, ModuleSpec, VermaModule

settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("ci")

#: the three guard-passing Borel weights used for replication
WEIGHTS = (
    (Fraction(7, 3), Fraction(5, 7)),
    (Fraction(11, 5), Fraction(-3, 7)),
    (Fraction(13, 4), Fraction(9, 11)),
)

LAMBDA1S = tuple(l1 for l1, _ in WEIGHTS)


@pytest.fixture(scope="session")
def borel_modules():
    return {w: VermaModule(ModuleSpec(BOREL, w[0], w[1], 12)) for w in WEIGHTS}


@pytest.fixture(scope="session")
def borel_module(borel_modules):
    return borel_modules[WEIGHTS[0]]


@pytest.fixture(scope="session")
def parabolic_modules():
    out = {}
    for v in (0, 1, 2, 3):
        for l1 in LAMBDA1S:
            out[(l1, v)] = VermaModule(ModuleSpec(PARABOLIC, l1, v, 12))
    return out
