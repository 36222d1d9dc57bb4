import json

import numpy as np
import pytest

from expfunc import ConfigError, FIXTURES, load_fixture, parse_model, phi
from expfunc.config import compile_expression, parse_inline


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_load(name):
    model = load_fixture(name)
    assert model.name == name
    assert phi(model.spec, 1.0).real > 0


def test_stable_fixture_value():
    assert phi(load_fixture("stable_a05").spec, 4.0) == pytest.approx(2.0)


@pytest.mark.parametrize(
    "data",
    [
        {"model": "stable", "params": {"c": 1.0}},
        {"model": "stable", "params": {"c": 1.0, "alpha": 1.5}},
        {"model": "stable", "params": {"c": 1.0, "alpha": 0.5, "beta": 2}},
        {"model": "stable", "params": {"c": 1.0, "alpha": 0.5}, "extra": 1},
        {"model": "brownian"},
        {"model": "pure_kill"},
        {"model": "pure_kill", "q": -1},
        {"model": "cpp_atoms", "params": {"locations": [1.0], "masses": [1.0, 2.0]}},
        {"model": "gamma_sub", "params": {"a": "one", "b": 1}},
        [1, 2],
    ],
)
def test_rejections(data):
    with pytest.raises(ConfigError):
        parse_model(data)


def test_bad_json():
    with pytest.raises(ConfigError):
        parse_inline("{not json")


@pytest.mark.parametrize("text", ["__import__('os')", "y.real", "open('x')", "lambda: 1", "[y]", "exp(y, key=1)"])
def test_expression_whitelist(text):
    with pytest.raises(ConfigError):
        compile_expression(text)


def test_expression_evaluates():
    f = compile_expression("exp(-y) / (1 + y ** 2) - log1p(y) * pi")
    y = 0.7
    assert f(y) == pytest.approx(np.exp(-y) / (1 + y**2) - np.log1p(y) * np.pi)


def test_custom_density_round_trip():
    text = json.dumps({"model": "custom_density", "params": {"density": "exp(-y) / y", "tail": "exp1(y)"}})
    spec = parse_inline(text).spec
    assert phi(spec, 2.0).real == pytest.approx(np.log(3.0), rel=1e-10)
