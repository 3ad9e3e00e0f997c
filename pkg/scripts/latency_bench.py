"""Time-to-first-estimate vs full-scan latency across table sizes.

For each table size the script reports the wall time of (a) the first
streamed estimate at the given sample percentage, (b) consuming the
stream until the confidence half-width drops under a target fraction of
the value range, and (c) the exact full-scan answer.

    python scripts/latency_bench.py --sizes 800 2000 4000 7000 9500
"""
import argparse
import time

from convergence_demo import CATALOG, QUERY, synthetic_employees

from softagg import build_kb, exact_answer, new_sampler, parse, rewrite, run_query


def bench_one(rows: int, sample_pct: float, target: float, seed: int):
    rel = synthetic_employees(rows, seed)
    kb = build_kb(rel, CATALOG, 0.4)
    aq = rewrite(parse(QUERY), sample_pct, kb.value_ranges)
    lo, hi = aq.interval

    t0 = time.perf_counter()
    sampler = new_sampler(rel.ids, sample_pct, seed)
    stream = run_query(kb, aq, sampler, rel, CATALOG)
    next(stream)
    t_first = time.perf_counter() - t0

    t0 = time.perf_counter()
    sampler = new_sampler(rel.ids, sample_pct, seed)
    n_at_target = None
    for ev in run_query(kb, aq, sampler, rel, CATALOG):
        if ev.error_rate <= target * (hi - lo):
            n_at_target = ev.n
            break
    t_target = time.perf_counter() - t0

    t0 = time.perf_counter()
    exact_answer(kb, aq, rel, CATALOG)
    t_exact = time.perf_counter() - t0
    return t_first, t_target, n_at_target, t_exact


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[800, 2000, 4000, 7000, 9500])
    ap.add_argument("--sample-pct", type=float, default=1.0)
    ap.add_argument("--target", type=float, default=0.10,
                    help="stop once the half-width is under this fraction of the range")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    print(f"{'rows':>7}  {'first est':>10}  {'<= target':>10}  {'n@target':>9}  {'full scan':>10}")
    for rows in args.sizes:
        t_first, t_target, n_at, t_exact = bench_one(
            rows, args.sample_pct, args.target, args.seed)
        print(f"{rows:>7}  {t_first * 1e3:8.2f}ms  {t_target * 1e3:8.2f}ms  "
              f"{n_at if n_at is not None else '-':>9}  {t_exact * 1e3:8.2f}ms")


if __name__ == "__main__":
    main()
