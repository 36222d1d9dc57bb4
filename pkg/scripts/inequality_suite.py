"""Run the Bernstein-function inequality suite and the arg φ* diagnostic."""
import argparse

import numpy as np

from expfunc import FIXTURES, load_fixture, validate_inequalities
from expfunc.bgamma import arg_phistar_diagnostic


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("fixtures", nargs="*", default=[n for n in FIXTURES if n != "rv_index1"])
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args()
    for name in args.fixtures:
        spec = load_fixture(name).spec
        report = validate_inequalities(spec, args.samples, args.seed)
        diag = arg_phistar_diagnostic(spec, np.logspace(-2, 3, 11), np.logspace(-3, 3, 25))
        status = "pass" if report.passed and diag.nonnegative else "FAIL"
        print(f"{name:<14}{status}  min arg φ* {diag.min_value:.3e}")
        for r in report.records:
            if r.violations:
                print(f"    {r.inequality_id}: {r.violations} violations, worst margin {r.worst_margin:.3e}")


if __name__ == "__main__":
    main()
