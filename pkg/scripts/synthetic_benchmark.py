"""Train the baselines and the RNN / BiLSTM family on synthetic corpora over several seeds.

    python scripts/synthetic_benchmark.py --seeds 0 8 --models rnn bilstm bilstm2 bilstm3
"""

import argparse

from reactsent.experiments import BILSTM_FAMILY, BenchmarkConfig, synthetic_benchmark


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, nargs=2, default=[0, 3], metavar=("FIRST", "STOP"))
    parser.add_argument("--models", nargs="+", default=["rnn", *BILSTM_FAMILY])
    parser.add_argument("--label-noise", type=float, default=0.1)
    args = parser.parse_args()
    names = ["core", "star", "majority", *args.models]
    print("seed  " + "  ".join(f"{n:>9}" for n in names) + "   family>=rnn  seconds   (F1, latent / reaction labels)")
    for seed in range(*args.seeds):
        r = synthetic_benchmark(BenchmarkConfig(models=tuple(args.models), label_noise=args.label_noise, seed=seed))
        cells = "  ".join(f"{r.f1(n):4.1f}/{r.f1(n, clean=False):4.1f}" for n in names)
        ok = r.family_f1() >= r.f1("rnn") if "rnn" in r.clean and any(m in r.clean for m in BILSTM_FAMILY) else "-"
        print(f"{seed:>4}  {cells}   {str(ok):>11}  {r.seconds:7.0f}")


if __name__ == "__main__":
    main()
