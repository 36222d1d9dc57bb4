"""Check that inverted densities integrate to one.

Integrates f over [lo, X] on log-spaced Gauss-Legendre panels, where
varphi_star(X) = level, and adds lo·f(lo) and the inverted tail P(I > X).
"""
import argparse
import math
import time

import numpy as np
from scipy.optimize import brentq

from expfunc import FIXTURES, density_deriv, load_fixture, tail, varphi_star
from expfunc.phistar import context, in_domain
from expfunc.quadrature import panel_nodes


def upper_limit(spec, level):
    ctx = context(spec)
    lo = 1e-6
    while not in_domain(ctx, lo):
        lo = 1.5 * lo + ctx.domain_left
    return brentq(lambda x: varphi_star(ctx, x) - level, lo, 1e6)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("fixtures", nargs="*", default=[n for n in FIXTURES if n != "rv_index1"])
    p.add_argument("--lo", type=float, default=1e-7)
    p.add_argument("--panels", type=int, default=8)
    p.add_argument("--order", type=int, default=12)
    p.add_argument("--level", type=float, default=20.0)
    p.add_argument("--tol", type=float, default=1e-9)
    args = p.parse_args()
    print(f"{'fixture':<14}{'X':>10}{'norm - 1':>12}{'seconds':>9}")
    for name in args.fixtures:
        spec = load_fixture(name).spec
        t0 = time.perf_counter()
        X = upper_limit(spec, args.level)
        nodes, w = panel_nodes(np.linspace(math.log(args.lo), math.log(X), args.panels + 1), args.order)
        xs = np.exp(nodes.ravel())
        f = np.array([density_deriv(spec, x, 0, args.tol).value for x in xs])
        total = np.sum(w.ravel() * f * xs) + args.lo * max(f[0], 0.0) + tail(spec, X, args.tol).value
        print(f"{name:<14}{X:>10.4g}{total - 1:>12.2e}{time.perf_counter() - t0:>9.1f}")


if __name__ == "__main__":
    main()
