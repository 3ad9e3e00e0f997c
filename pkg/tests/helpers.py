"""Shared generators for randomized end-to-end scenarios."""
import random

from softagg import (
    LinguisticLabel,
    MembershipFunction,
    Relation,
    build_kb,
    parse,
    rewrite,
)


def random_dataset(rng: random.Random, max_rows: int = 2000):
    """A random relation + catalog + KB, engine-ready.

    Rows carry two numeric attributes; between one and three random
    trapezoid labels over them become the query's predicates.  Returns
    (relation, labels, kb, predicate_text).
    """
    m = rng.randint(1, max_rows)
    ids = rng.sample(range(1, max_rows * 10), m)
    xs = [rng.uniform(0.0, 100.0) for _ in range(m)]
    ys = [rng.uniform(0.0, 100.0) for _ in range(m)]
    rel = Relation("data", ids=ids, columns={"x": xs, "y": ys})

    k = rng.randint(1, 3)
    labels = []
    for i in range(k):
        attr = rng.choice(["x", "y"])
        params = sorted(rng.uniform(-20.0, 120.0) for _ in range(4))
        labels.append(LinguisticLabel(attr, f"l{i}", MembershipFunction("trapezoid", tuple(params))))

    tau = rng.choice([0.0, 0.4])
    kb = build_kb(rel, labels, tau)
    preds = " AND ".join(f"{lab.attribute} IS {lab.name}" for lab in labels)
    return rel, labels, kb, preds


def query_for(aggregate: str, preds: str, kb, sample_pct: float, star: bool = False):
    target = "(*)" if aggregate == "COUNT" and star else "(x)"
    q = parse(f"SELECT {aggregate}{target} FROM data WHERE {preds}")
    return rewrite(q, sample_pct, kb.value_ranges)


def random_scenario(rng: random.Random, max_rows: int = 2000):
    """random_dataset plus one random rewritten query over it."""
    rel, labels, kb, preds = random_dataset(rng, max_rows)
    aggregate = rng.choice(["AVG", "SUM", "COUNT"])
    s = rng.choice([1.0, 5.0, 17.5, 50.0, 100.0])
    aq = query_for(aggregate, preds, kb, s, star=rng.random() < 0.5)
    text = aq.base.render()
    return rel, labels, kb, aq, text


def close_enough(a, b, rel_tol: float = 1e-9) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= rel_tol * max(1.0, abs(a), abs(b))
