#!/usr/bin/env python3
"""Freeze reference values used by the unit tests into tests/data/.

Values come from tools independent of the C++ code: nltk (Porter stemmer),
scipy.stats.kruskal, and plain floating point arithmetic.

    python3 tools/fixtures/oracles.py
"""

import json
import math
import random
from pathlib import Path

from scipy.stats import kruskal

from gen_corpus import normalize

ROOT = Path(__file__).resolve().parents[2]


def cosine(a, b):
    num = sum(w * b.get(t, 0.0) for t, w in a.items())
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return num / (na * nb)


def main():
    out = {}
    out["normalize"] = {t: normalize(t) for t in [
        "Java Programming!", "an island of Indonesia", "fast contextual web search engine tools",
        "coffee brewed from beans grown in the east indies"]}
    out["cosine_ab_a"] = cosine({"a": 1, "b": 1}, {"a": 1})
    out["cosine_coffee_concept"] = cosine({"coffee": 1}, {"coffee": 1, "espresso": 1})

    # three docs [t t x], [t y z], [u v w]; context {t}
    idf = lambda df: math.log(3 / df)
    d1 = {"t": 2 * idf(2), "x": idf(1)}
    d2 = {"t": idf(2), "y": idf(1), "z": idf(1)}
    out["tfidf_twice"] = cosine(d1, {"t": idf(2)})
    out["tfidf_once"] = cosine(d2, {"t": idf(2)})

    # profile entry {java, island}; sense words [island, indonesia] vs [platform, softwar]
    out["sense_island"] = cosine({"island": 1, "indonesia": 1}, {"java": 1, "island": 1})

    r = kruskal([1, 2, 3], [4, 5, 6], [7, 8, 9])
    out["kw_123"] = {"h": float(r.statistic), "p": float(r.pvalue)}
    (ROOT / "tests/data/oracle_values.json").write_text(json.dumps(out, indent=2) + "\n")

    rng = random.Random(2024)
    with open(ROOT / "tests/data/kruskal_scipy.tsv", "w") as f:
        f.write("# groups separated by '|', values by ','\th\tp\n")
        for _ in range(40):
            groups = []
            for _ in range(rng.randint(2, 5)):
                n = rng.randint(1, 8)
                groups.append([rng.choice([rng.randint(0, 6), round(rng.uniform(-5, 5), 3)]) for _ in range(n)])
            if len({v for g in groups for v in g}) < 2:
                continue
            r = kruskal(*groups)
            spec = "|".join(",".join(repr(float(v)) for v in g) for g in groups)
            f.write(f"{spec}\t{float(r.statistic)!r}\t{float(r.pvalue)!r}\n")


if __name__ == "__main__":
    main()
