"""Compare the compiled space-walk kernels against the pure-Python fallback.

Usage:
    python3 benchmarks/kernel_benchmark.py
    python3 benchmarks/kernel_benchmark.py --instances 400 --advertisers 16
    python3 benchmarks/kernel_benchmark.py --repeats 5 --seed 9

Times the three allocation rules that dispatch into the kernel layer, once
per backend, over the same generated corpus. Outputs are cross-checked for
exact equality before any timing is reported.
"""

import argparse
import time

from richads import harness, heuristics, kernels, monotone
from richads.model import truthful_profile

RULES = (
    ("bpb", monotone.bpb_allocation),
    ("max-value", monotone.max_value_allocation),
    ("greedy-value", heuristics.greedy_by_value),
)


def build_corpus(args):
    cfg = harness.ExperimentConfig(
        seed=args.seed,
        instances=args.instances,
        max_advertisers=args.advertisers,
        max_ads=args.ads,
        max_space=30,
        max_total_space=150,
    )
    corpus = harness.generate_corpus(cfg)
    return [(inst, truthful_profile(inst)) for inst in corpus]


def run_backend(name, corpus, repeats):
    kernels.set_backend(name)
    timings = {}
    for rule_name, rule in RULES:
        best = None
        for _ in range(repeats):
            start = time.perf_counter()
            for inst, truth in corpus:
                rule(inst, truth)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        timings[rule_name] = best / len(corpus)
    return timings


def run_walk_only(name, views, repeats):
    kernels.set_backend(name)
    best = None
    for _ in range(repeats):
        start = time.perf_counter()
        for view in views:
            kernels.run_space_auction(view, False)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best / len(views)


def check_agreement(corpus):
    backends = kernels.available_backends()
    for inst, truth in corpus:
        outputs = []
        for name in backends:
            kernels.set_backend(name)
            outputs.append([rule(inst, truth).entries for _, rule in RULES])
        if any(out != outputs[0] for out in outputs[1:]):
            raise SystemExit(f"backend outputs disagree on a corpus instance: {inst.adv_ids()}")


def main():
    parser = argparse.ArgumentParser(description="Allocation kernel backend comparison")
    parser.add_argument("--instances", type=int, default=200, help="corpus size (default: 200)")
    parser.add_argument("--advertisers", type=int, default=12, help="max advertisers per instance (default: 12)")
    parser.add_argument("--ads", type=int, default=6, help="max ads per advertiser (default: 6)")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats, best kept (default: 3)")
    parser.add_argument("--seed", type=int, default=1, help="corpus seed (default: 1)")
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {kernels.backend_name()})")
    corpus = build_corpus(args)
    print(f"corpus: {len(corpus)} instances, up to {args.advertisers} advertisers x {args.ads} ads\n")

    original = kernels.backend_name()
    try:
        check_agreement(corpus)
        results = {name: run_backend(name, corpus, args.repeats) for name in backends}
        views = [kernels.ScaledView(inst, truth) for inst, truth in corpus]
        walk = {name: run_walk_only(name, views, max(args.repeats, 5)) for name in backends}
    finally:
        kernels.set_backend(original)

    def table(title, rows):
        print("{:<22} {:>12} {:>12} {:>10}".format(title, "pure (us)", "fast (us)", "speedup"))
        print("-" * 58)
        for label, timings in rows:
            pure = timings["pure"] * 1e6
            if "fast" in timings:
                fast = timings["fast"] * 1e6
                print("{:<22} {:>12.1f} {:>12.1f} {:>9.2f}x".format(label, pure, fast, pure / fast))
            else:
                print("{:<22} {:>12.1f} {:>12} {:>10}".format(label, pure, "n/a", "n/a"))
        print()

    # full rule calls include instance scaling and allocation assembly in
    # Python, so they bound the end-to-end win; the bare walk on pre-built
    # views is where the compiled loop actually runs
    table("rule (end to end)", [(n, {b: results[b][n] for b in backends}) for n, _ in RULES])
    table("space walk (view only)", [("bpb walk", {b: walk[b] for b in backends})])


if __name__ == "__main__":
    main()
