"""JSON model ingestion and the shipped fixture library.

A model file looks like ``{"model": "stable", "params": {"c": 1, "alpha": 0.5}}``
with optional top-level ``q`` (killing rate), ``d`` (drift) and ``name``.
Unknown keys are rejected.
"""
from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import special

from .bernstein import BernsteinSpec
from .errors import ConfigError
from .measures import Atoms, Density, ExpJumpCPP, GammaSub, NoJumps, Stable

TOP_KEYS = {"model", "params", "q", "d", "name", "description"}

MODEL_PARAMS = {
    "stable": ({"c", "alpha"}, set()),
    "gamma_sub": ({"a", "b"}, set()),
    "pure_kill": (set(), set()),
    "cpp_atoms": ({"locations", "masses"}, set()),
    "exp_jump_cpp": ({"rate", "scale"}, set()),
    "custom_density": ({"density", "tail"}, {"rv_index", "integrated_tail"}),
}

FIXTURES = (
    "stable_a03",
    "stable_a05",
    "stable_a07",
    "gamma_sub",
    "pure_kill_q1",
    "pure_kill_q2",
    "cpp_atoms",
    "exp_jump_cpp",
    "rv_index1",
)


@dataclass(frozen=True)
class Model:
    name: str
    kind: str
    spec: BernsteinSpec
    raw: dict


# ---------------------------------------------------------------------------
# expressions in one variable y

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {
    "exp": np.exp,
    "expm1": np.expm1,
    "log": np.log,
    "log1p": np.log1p,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "arctan": np.arctan,
    "abs": np.abs,
    "gamma": special.gamma,
    "exp1": special.exp1,
}
_CONSTS = {"pi": math.pi, "e": math.e}


def _compile_node(node):
    if isinstance(node, ast.Expression):
        return _compile_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        v = float(node.value)
        return lambda y: v
    if isinstance(node, ast.Name):
        if node.id == "y":
            return lambda y: y
        if node.id in _CONSTS:
            v = _CONSTS[node.id]
            return lambda y: v
        raise ConfigError(f"unknown name {node.id!r} in expression")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile_node(node.left), _compile_node(node.right)
        return lambda y: op(left(y), right(y))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op = _UNARY[type(node.op)]
        inner = _compile_node(node.operand)
        return lambda y: op(inner(y))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
        fn = _FUNCS[node.func.id]
        args = [_compile_node(a) for a in node.args]
        return lambda y: fn(*(a(y) for a in args))
    raise ConfigError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")


def compile_expression(text: str):
    """Compile an arithmetic expression in ``y`` (numpy functions allowed) to a callable."""
    if not isinstance(text, str) or len(text) > 2000:
        raise ConfigError("expression must be a string of at most 2000 characters")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from None
    fn = _compile_node(tree)

    def call(y):
        with np.errstate(over="ignore", under="ignore"):
            return fn(y)

    return call


# ---------------------------------------------------------------------------
# model parsing


def _number(value, key, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{key} must be finite")
    if positive and not v > 0:
        raise ConfigError(f"{key} must be positive")
    if nonneg and v < 0:
        raise ConfigError(f"{key} must be nonnegative")
    return v


def parse_model(data: dict) -> Model:
    if not isinstance(data, dict):
        raise ConfigError("model config must be a JSON object")
    extra = set(data) - TOP_KEYS
    if extra:
        raise ConfigError(f"unknown keys: {sorted(extra)}")
    kind = data.get("model")
    if kind not in MODEL_PARAMS:
        raise ConfigError(f"model must be one of {sorted(MODEL_PARAMS)}")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    required, optional = MODEL_PARAMS[kind]
    missing = required - set(params)
    unknown = set(params) - required - optional
    if missing:
        raise ConfigError(f"{kind}: missing params {sorted(missing)}")
    if unknown:
        raise ConfigError(f"{kind}: unknown params {sorted(unknown)}")
    q = _number(data.get("q", 0.0), "q", nonneg=True)
    d = _number(data.get("d", 0.0), "d", nonneg=True)

    if kind == "stable":
        measure = Stable(_number(params["c"], "c", positive=True), _number(params["alpha"], "alpha", positive=True))
    elif kind == "gamma_sub":
        measure = GammaSub(_number(params["a"], "a", positive=True), _number(params["b"], "b", positive=True))
    elif kind == "pure_kill":
        measure = NoJumps()
        if q <= 0:
            raise ConfigError("pure_kill needs q > 0")
    elif kind == "cpp_atoms":
        locs, masses = params["locations"], params["masses"]
        if not isinstance(locs, list) or not isinstance(masses, list):
            raise ConfigError("locations and masses must be lists")
        measure = Atoms(
            tuple(_number(v, "location", positive=True) for v in locs),
            tuple(_number(v, "mass", positive=True) for v in masses),
        )
    elif kind == "exp_jump_cpp":
        measure = ExpJumpCPP(_number(params["rate"], "rate", positive=True), _number(params["scale"], "scale", positive=True))
    else:
        rv = params.get("rv_index")
        measure = Density(
            density_fn=compile_expression(params["density"]),
            tail_fn=compile_expression(params["tail"]),
            rv_index=None if rv is None else _number(rv, "rv_index", nonneg=True),
            label=str(data.get("name", "custom_density")),
            integrated_tail_fn=compile_expression(params["integrated_tail"]) if "integrated_tail" in params else None,
        )
    try:
        spec = BernsteinSpec(q=q, d=d, measure=measure)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return Model(str(data.get("name", kind)), kind, spec, data)


def load_model(path) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read model file {path}: {exc.strerror}") from None
    return parse_inline(text)


def parse_inline(text: str) -> Model:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    return parse_model(data)


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise ConfigError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return Path(str(resources.files("expfunc") / "fixtures" / f"{name}.json"))


def load_fixture(name: str) -> Model:
    return load_model(fixture_path(name))
