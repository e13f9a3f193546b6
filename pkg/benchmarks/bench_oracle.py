"""Compare the compiled and pure-Python oracle backends.

    python3 benchmarks/bench_oracle.py [--formulas N] [--worlds W]
"""

import argparse
import time

from nqgl import oracle
from nqgl.generators import propositional_corpus
from nqgl.oracle import validity_oracle


def bench(backend, corpus, worlds):
    t0 = time.perf_counter()
    verdicts = [validity_oracle(f, worlds, backend=backend) is None for f in corpus]
    return time.perf_counter() - t0, verdicts


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--formulas", type=int, default=200)
    ap.add_argument("--worlds", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    corpus = propositional_corpus(args.formulas, seed=args.seed)
    backends = ["python"] + (["compiled"] if oracle.BACKEND == "compiled" else [])
    results = {}
    for b in backends:
        dt, verdicts = bench(b, corpus, args.worlds)
        results[b] = verdicts
        print(f"{b:9s} {dt:8.3f}s  {sum(verdicts)} valid of {len(verdicts)}")
    if len(results) == 2:
        assert results["python"] == results["compiled"], "backends disagree"
        print("backends agree")
    else:
        print("compiled backend not built; only the fallback was timed")


if __name__ == "__main__":
    main()
