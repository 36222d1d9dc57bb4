"""Print density / asymptotic ratio tables on a varphi_star-spaced grid."""
import argparse

from scipy.optimize import brentq

from expfunc import FIXTURES, load_fixture, ratio_table, varphi_star
from expfunc.phistar import context, in_domain


def grid(spec, levels):
    ctx = context(spec)
    lo = 1e-6
    while not in_domain(ctx, lo):
        lo = 1.5 * lo + ctx.domain_left
    return [brentq(lambda x: varphi_star(ctx, x) - v, lo, 1e6) for v in levels]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("fixtures", nargs="*", default=["stable_a03", "stable_a05", "stable_a07", "gamma_sub", "cpp_atoms"])
    p.add_argument("--levels", type=float, nargs="+", default=[2.0, 5.0, 10.0, 20.0, 50.0])
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--corollary", action="store_true", help="use the compound Poisson asymptotic")
    args = p.parse_args()
    for name in args.fixtures:
        spec = load_fixture(name).spec
        print(f"# {name}, n={args.n}")
        print(f"{'x':>12}{'density':>14}{'asymptotic':>14}{'ratio':>12}")
        for r in ratio_table(spec, grid(spec, args.levels), args.n, corollary=args.corollary):
            print(f"{r.x:>12.5g}{r.density:>14.6e}{r.asymptotic:>14.6e}{r.ratio:>12.6f} {r.warning}")


if __name__ == "__main__":
    main()
