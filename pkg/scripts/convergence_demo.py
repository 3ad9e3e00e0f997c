"""Watch a fuzzy aggregate estimate converge on synthetic employee data.

Generates a relation with correlated age/salary columns, builds the KB,
then streams a flexible AVG query and prints the estimate with its
confidence band as rows accumulate, ending with the exact full-scan
answer for comparison.

    python scripts/convergence_demo.py --rows 20000 --sample-pct 1 --seed 7
"""
import argparse
import random

from softagg import (
    LinguisticLabel,
    MembershipFunction,
    Relation,
    build_kb,
    exact_answer,
    new_sampler,
    parse,
    rewrite,
    run_query,
)


def synthetic_employees(rows: int, seed: int) -> Relation:
    rng = random.Random(seed)
    ids = list(range(1, rows + 1))
    ages, salaries = [], []
    for _ in ids:
        age = min(70.0, max(18.0, rng.gauss(40.0, 12.0)))
        base = 300.0 + 14.0 * (age - 18.0)
        salaries.append(round(min(2000.0, max(250.0, rng.gauss(base, 180.0))), 2))
        ages.append(round(age, 1))
    return Relation("employee", ids=ids, columns={"Age": ages, "Salary": salaries})


CATALOG = [
    LinguisticLabel("Age", "Young", MembershipFunction("trapezoid", (16, 18, 28, 38))),
    LinguisticLabel("Age", "Adult", MembershipFunction("L", (28, 38))),
    LinguisticLabel("Salary", "Low", MembershipFunction("gamma", (450, 700))),
    LinguisticLabel("Salary", "Middle", MembershipFunction("trapezoid", (450, 700, 900, 1200))),
    LinguisticLabel("Salary", "High", MembershipFunction("L", (900, 1200))),
]

QUERY = "SELECT AVG(Salary) FROM employee WHERE Age IS Young AND Salary IS Low"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=10_000)
    ap.add_argument("--sample-pct", type=float, default=1.0)
    ap.add_argument("--threshold", type=float, default=0.4)
    ap.add_argument("--confidence", type=float, default=0.95)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rel = synthetic_employees(args.rows, args.seed)
    kb = build_kb(rel, CATALOG, args.threshold)
    q = parse(f"{QUERY} WITH CONFIDENCE {args.confidence}")
    aq = rewrite(q, args.sample_pct, kb.value_ranges)
    sampler = new_sampler(rel.ids, aq.sample_pct, args.seed)

    print(f"{QUERY}  [m={kb.m}, s={args.sample_pct}%, tau={args.threshold}]")
    print(f"{'n':>8}  {'estimate':>12}  {'half-width':>12}  {'pct':>6}")
    shown = 0
    for ev in run_query(kb, aq, sampler, rel, CATALOG):
        # print roughly twenty lines however many batches there are
        stride = max(1, (ev.m // max(1, sampler.batch_size)) // 20)
        if ev.batch % stride and not ev.done:
            continue
        est = "n/a" if ev.estimate is None else f"{ev.estimate:12.4f}"
        print(f"{ev.n:>8}  {est:>12}  {ev.error_rate:12.4f}  {ev.fraction * 100:5.1f}%")
        shown += 1
    exact = exact_answer(kb, aq, rel, CATALOG)
    print(f"\nexact answer: {exact:.4f}" if exact is not None else "\nexact answer: undefined")


if __name__ == "__main__":
    main()
