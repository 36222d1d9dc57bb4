"""Command-line front end.

Subcommands: eval, density, asympt, validate, simulate. Every output embeds a
run manifest; CSV outputs carry it on a leading ``# manifest=`` comment line.
Exit codes: 0 success, 1 validation failed, 2 input/config error, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .asymptotics import cpp_asymptotic, ratio_table
from .bernstein import (
    default_lambda_grid,
    phi_all,
    positive_increase_report,
    validate_inequalities,
)
from .bgamma import T_phis, arg_phistar_diagnostic, log_mellin, log_W
from .config import FIXTURES, load_fixture, load_model, parse_inline
from .errors import ConfigError, DomainError, ExpFuncError, InconclusiveDiagnostic
from .inversion import density_deriv, moment
from .montecarlo import SimConfig, compare_to_inversion, sample_batch
from .phistar import phi_star

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    model_path: str | None
    model_inline: str | None
    out: str | None
    tol: float | None
    seed: int | None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_complex(text: str) -> complex:
    """Parse "a+bi" (also "a+bj", "a", "bi")."""
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}; expected a+bi") from None


def parse_list(text: str) -> list[float]:
    s = text.strip()
    if s.startswith("x="):
        s = s[2:]
    if not s:
        return []
    try:
        vals = [float(v) for v in s.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse number list {text!r}") from None
    return vals


def _load(args):
    if args.inline is not None:
        return parse_inline(args.inline)
    path = Path(args.model)
    if not path.exists():
        stem = path.name[:-5] if path.name.endswith(".json") else path.name
        if stem in FIXTURES and path.parent == Path("."):
            return load_fixture(stem)
    return load_model(path)


def _manifest(args) -> RunManifest:
    return RunManifest(
        subcommand=args.command,
        model_path=getattr(args, "model", None),
        model_inline=getattr(args, "inline", None),
        out=getattr(args, "out", None),
        tol=getattr(args, "tol", None),
        seed=getattr(args, "seed", None),
    )


def _cx(v: complex) -> dict:
    return {"re": float(v.real), "im": float(v.imag)}


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict):
    payload = {"manifest": _manifest(args).to_dict(), **payload}
    _emit(args, json.dumps(payload, indent=2, allow_nan=True) + "\n")


def _emit_table(args, columns: list[str], rows: list[list], extra: dict | None = None):
    if args.format == "json":
        _emit_json(args, {"columns": columns, "rows": [dict(zip(columns, r)) for r in rows], **(extra or {})})
        return
    buf = io.StringIO()
    buf.write("# manifest=" + json.dumps(_manifest(args).to_dict(), sort_keys=True) + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    _emit(args, buf.getvalue())


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    model = _load(args)
    z = parse_complex(args.z)
    if not z.real > 0:
        raise ConfigError("z must satisfy Re z > 0")
    f0, f1, f2 = phi_all(model.spec, z)
    out = {
        "z": _cx(z),
        "phi": _cx(complex(f0)),
        "phi_d1": _cx(complex(f1)),
        "phi_d2": _cx(complex(f2)),
        "phi_star": _cx(complex(phi_star(model.spec, z))),
        "log_M": _cx(complex(log_mellin(model.spec, z))),
        "log_W": _cx(complex(log_W(model.spec, z))),
    }
    _emit_json(args, out)
    return EXIT_OK


def _status(exc: Exception) -> str:
    if isinstance(exc, DomainError):
        return "DOMAIN"
    return "NONCONVERGENT"


def cmd_density(args) -> int:
    model = _load(args)
    xs = parse_list(args.x)
    rows, code = [], EXIT_OK
    for x in xs:
        try:
            r = density_deriv(model.spec, x, args.n, args.tol)
            rows.append([x, args.n, r.value, r.abs_err, "OK"])
        except ExpFuncError as exc:
            rows.append([x, args.n, math.nan, math.nan, _status(exc)])
            code = EXIT_NUMERIC
    _emit_table(args, ["x", "n", "value", "abs_err", "status"], rows)
    return code


def cmd_asympt(args) -> int:
    model = _load(args)
    xs = parse_list(args.x)
    rows, code = [], EXIT_OK
    for x in xs:
        try:
            (r,) = ratio_table(model.spec, [x], args.n, args.tol, corollary=args.corollary)
            rows.append([x, args.n, r.density, r.density_err, r.asymptotic, r.ratio, r.warning or "", "OK"])
        except ExpFuncError as exc:
            rows.append([x, args.n, math.nan, math.nan, math.nan, math.nan, "", _status(exc)])
            code = EXIT_NUMERIC
    extra = None
    if args.corollary and rows:
        c = cpp_asymptotic(model.spec, 1.0, args.n)
        extra = {"corollary": {"constant": c.constant, "regime": c.regime, "caveat": c.caveat}}
    _emit_table(args, ["x", "n", "density", "density_err", "asymptotic", "ratio", "warning", "status"], rows, extra)
    return code


def _suite_appendix_a(spec, args) -> tuple[bool, dict]:
    rep = validate_inequalities(spec, args.samples, args.seed)
    a_grid = np.logspace(-2, 3, 11)
    t_grid = np.logspace(-3, 3, 25)
    arg = arg_phistar_diagnostic(spec, a_grid, t_grid)
    passed = rep.passed and arg.nonnegative
    return passed, {
        "inequalities": rep.to_dict(),
        "arg_phistar": {
            "nonnegative": arg.nonnegative,
            "min_value": arg.min_value,
            "min_t_times_value": arg.min_t_times_value,
        },
    }


def _suite_bgamma(spec, args) -> tuple[bool, dict]:
    ns = np.arange(1, 16)
    logs = np.asarray(log_W(spec, ns + 1.0 + 0j))
    phis = np.asarray(phi_all(spec, ns + 0j)[0]).real
    prods = np.cumprod(phis)
    rel = np.abs(np.exp(logs) - prods) / np.abs(prods)
    records = [{"n": int(n), "log_W": float(l.real), "product": float(p), "rel_err": float(e)} for n, l, p, e in zip(ns, logs, prods, rel)]
    passed = bool(np.all(rel <= 1e-8))
    return passed, {"recurrence": records, "max_rel_err": float(rel.max()), "T_phis": T_phis(spec)}


def _suite_positive_increase(spec, args) -> tuple[bool, dict]:
    try:
        rep = positive_increase_report(spec, default_lambda_grid())
        return True, {"positive_increase": rep.to_dict(), "inconclusive": False}
    except InconclusiveDiagnostic as exc:
        warnings.warn(str(exc), stacklevel=2)
        rep = exc.report
        return True, {"positive_increase": rep.to_dict() if rep else None, "inconclusive": True, "warning": str(exc)}


SUITES = {
    "appendix-a": _suite_appendix_a,
    "bgamma": _suite_bgamma,
    "positive-increase": _suite_positive_increase,
}


def cmd_validate(args) -> int:
    model = _load(args)
    passed, body = SUITES[args.suite](model.spec, args)
    _emit_json(args, {"suite": args.suite, "model": model.name, "passed": passed, **body})
    return EXIT_OK if passed else EXIT_FAILED


def cmd_simulate(args) -> int:
    model = _load(args)
    cfg = SimConfig(
        sample_count=args.samples,
        seed=args.seed,
        jump_threshold=args.threshold,
        stop_level=args.stop_level,
        worker_count=args.workers,
    )
    batch = sample_batch(model.spec, cfg)
    if args.compare is not None:
        rows = compare_to_inversion(model.spec, cfg, parse_list(args.compare), batch=batch, tol=args.tol)
        table = [[r.x, r.empirical_tail, r.inverted_tail, r.std_err, r.z_score, int(r.flagged)] for r in rows]
        _emit_table(args, ["x", "empirical_tail", "inverted_tail", "std_err", "z_score", "flagged"], table, {"batch": batch.to_dict()})
        return EXIT_OK
    if args.format == "csv":
        _emit_table(args, ["draw"], [[float(v)] for v in batch.draws])
        return EXIT_OK
    body = batch.to_dict()
    try:
        body["moment_1"] = moment(model.spec, 1)
    except ExpFuncError:
        body["moment_1"] = None
    _emit_json(args, body)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="expfunc", description="Exponential functionals of subordinators.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="csv", tol=True):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--model", help="model JSON file, or the name of a shipped fixture")
        src.add_argument("--inline", help="model JSON given on the command line")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=["csv", "json"], default=fmt_default)
        if tol:
            sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("eval", help="φ, φ', φ'', φ* and log M at a complex point")
    common(sp, "json", tol=False)
    sp.add_argument("--z", required=True, help='complex point "a+bi"')

    sp = sub.add_parser("density", help="n-th derivative of the density by Mellin-Barnes inversion")
    common(sp)
    sp.add_argument("--x", required=True, help="comma-separated x values")
    sp.add_argument("--n", type=int, default=0)

    sp = sub.add_parser("asympt", help="density vs large-x asymptotics")
    common(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--corollary", action="store_true", help="use the compound Poisson form")

    sp = sub.add_parser("validate", help="run a validation suite")
    common(sp, "json", tol=False)
    sp.add_argument("--suite", choices=sorted(SUITES), required=True)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--samples", type=int, default=10_000)

    sp = sub.add_parser("simulate", help="Monte Carlo draws of I_φ")
    common(sp, "json")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--threshold", type=float, default=1e-3)
    sp.add_argument("--stop-level", type=float, default=1e-8)
    sp.add_argument("--compare", help='tail comparison points, e.g. "x=1,2,4"')
    return p


COMMANDS = {
    "eval": cmd_eval,
    "density": cmd_density,
    "asympt": cmd_asympt,
    "validate": cmd_validate,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "tol", None) is not None and not (0 < args.tol <= 1e-2):
        print("error: --tol must lie in (0, 1e-2]", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "n", 0) < 0:
        print("error: --n must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = COMMANDS[args.command](args)
        for w in caught:
            if not issubclass(w.category, RuntimeWarning):
                print(f"warning: {w.message}", file=sys.stderr)
        return code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExpFuncError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
