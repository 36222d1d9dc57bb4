import math

import numpy as np
import pytest
from scipy import special

from expfunc import Atoms, BernsteinSpec, Density, ExpJumpCPP, GammaSub, Stable, load_fixture


@pytest.fixture
def stable_half():
    return BernsteinSpec(measure=Stable(1.0, 0.5))


@pytest.fixture
def atoms_one():
    return BernsteinSpec(measure=Atoms((1.0,), (1.0,)))


@pytest.fixture
def exp_jump():
    return BernsteinSpec(measure=ExpJumpCPP(1.0, 1.0))


@pytest.fixture
def gamma_one():
    return BernsteinSpec(measure=GammaSub(1.0, 1.0))


def stable_as_density(alpha, c=1.0):
    g = special.gamma(1 - alpha)
    return BernsteinSpec(
        measure=Density(
            lambda y: c * alpha / g * y ** (-1 - alpha),
            lambda y: c * y ** (-alpha) / g,
        )
    )


def gamma_as_density(a=1.0, b=1.0):
    return BernsteinSpec(measure=Density(lambda y: a * math.exp(-b * y) / y, lambda y: a * special.exp1(b * y)))


def fixture_spec(name):
    return load_fixture(name).spec


def rel(a, b):
    return abs(a - b) / abs(b)


POSITIVE_INCREASE_FIXTURES = (
    "stable_a03",
    "stable_a05",
    "stable_a07",
    "gamma_sub",
    "pure_kill_q1",
    "pure_kill_q2",
    "cpp_atoms",
    "exp_jump_cpp",
)
