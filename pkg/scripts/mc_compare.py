"""Compare simulated exponential functionals with the inverted tail and mean."""
import argparse

from expfunc import SimConfig, compare_to_inversion, load_fixture, moment, sample_batch


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("fixtures", nargs="*", default=["cpp_atoms", "exp_jump_cpp"])
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--x", type=float, nargs="+", default=[1.0, 2.0, 4.0])
    args = p.parse_args()
    for name in args.fixtures:
        spec = load_fixture(name).spec
        cfg = SimConfig(sample_count=args.samples, seed=args.seed)
        batch = sample_batch(spec, cfg)
        s = batch.summary
        m = moment(spec, 1)
        print(f"# {name}: scheme {batch.scheme}, mean {s['mean']:.6f} ± {s['std_err']:.1e}, E[I] = {m:.6f}")
        print(f"{'x':>6}{'empirical':>12}{'inverted':>12}{'z':>8}")
        for r in compare_to_inversion(spec, cfg, args.x, batch=batch):
            print(f"{r.x:>6g}{r.empirical_tail:>12.6f}{r.inverted_tail:>12.6f}{r.z_score:>8.2f}{'  !' if r.flagged else ''}")


if __name__ == "__main__":
    main()
