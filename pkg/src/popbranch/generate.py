"""Seeded random instance generation.

The generator is Erdos-Renyi style over ordered vertex pairs, with
uniform integer weights and per-head rank assignment where consecutive
edges of a shuffled order tie with a configurable probability.  Identical
parameters and seed give byte-identical output files.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from .augment import check_weight_assumption


@dataclass(frozen=True)
class GenParams:
    n: int
    density: float
    max_weight: int
    tie_prob: float = 0.0
    enforce_assumption: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must be within [0, 1]")
        if self.max_weight < 1:
            raise ValueError("max_weight must be at least 1")
        if not 0.0 <= self.tie_prob <= 1.0:
            raise ValueError("tie_prob must be within [0, 1]")


def generate_random(params: GenParams) -> dict:
    """Instance object (ready for canonical serialization) for ``params``.

    When the weight condition is enforced, the heaviest vertex is redrawn
    until the condition holds; the loop terminates with probability one
    because the all-equal weight vector always satisfies it.
    """
    rng = random.Random(params.seed)
    vw = max(3, len(str(params.n)))
    ids = [f"v{i + 1:0{vw}d}" for i in range(params.n)]

    weights = {v: rng.randint(1, params.max_weight) for v in ids}
    if params.enforce_assumption:
        while not check_weight_assumption(weights)[0]:
            heaviest = max(ids, key=lambda v: (weights[v], v))
            weights[heaviest] = rng.randint(1, params.max_weight)

    pairs: list[tuple[str, str]] = []
    for src in ids:
        for dst in ids:
            if src != dst and rng.random() < params.density:
                pairs.append((src, dst))
    ew = max(4, len(str(len(pairs))))
    edges = [
        {"id": f"e{i + 1:0{ew}d}", "src": src, "dst": dst}
        for i, (src, dst) in enumerate(pairs)
    ]

    incoming: dict[str, list[dict]] = {v: [] for v in ids}
    for edge in edges:
        incoming[edge["dst"]].append(edge)
    for v in ids:
        group = list(incoming[v])
        rng.shuffle(group)
        rank = 1
        for i, edge in enumerate(group):
            if i > 0 and rng.random() >= params.tie_prob:
                rank += 1
            edge["rank"] = rank

    return {
        "vertices": [{"id": v, "weight": weights[v]} for v in ids],
        "edges": edges,
        "meta": {"generator": asdict(params)},
    }
