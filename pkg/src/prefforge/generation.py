"""Builds comparison sets from problem instances, and synthesizes instances.

Pair selection honours per-kind quotas so the elicitation strategies
always have material: equal-vector pairs for the consistency check,
one-measure pairs for evolution analysis, two-measure pairs for the
importance-order check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidInputError
from .model import (
    Comparison,
    ComparisonSet,
    MeasureSchema,
    ProblemInstance,
    Solution,
    structure_kind,
)

__all__ = ["GenerationConfig", "generate_comparisons", "synthesize_instances"]

logger = logging.getLogger(__name__)

DEFAULT_QUOTAS = {
    "equal-vectors": 5,
    "one-measure-differs": 10,
    "two-measures-differ": 10,
    "unconstrained": 0,
}


@dataclass(frozen=True)
class GenerationConfig:
    max_instances: int = 50
    pairs_per_instance: int = 3
    structured_pair_quotas: dict[str, int] = field(
        default_factory=lambda: dict(DEFAULT_QUOTAS)
    )
    measure_tolerance: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.max_instances < 1:
            raise InvalidInputError("max_instances must be >= 1")
        if self.pairs_per_instance < 1:
            raise InvalidInputError("pairs_per_instance must be >= 1")
        if any(v < 0 for v in self.structured_pair_quotas.values()):
            raise InvalidInputError("structured_pair_quotas must be non-negative")
        if self.measure_tolerance < 0:
            raise InvalidInputError("measure_tolerance must be >= 0")


def generate_comparisons(
    instances: list[ProblemInstance],
    schema: MeasureSchema,
    config: GenerationConfig = GenerationConfig(),
) -> ComparisonSet:
    """Create an unanswered comparison set from solved problem instances.

    At most ``max_instances`` instances are used (uniform sample under the
    seed, original order preserved).  Per instance, up to
    ``pairs_per_instance`` distinct unordered solution pairs are emitted;
    pairs of kinds whose global quota is unmet are selected first.
    """
    usable = []
    for inst in instances:
        if len(inst.solutions) < 2:
            logger.warning("instance %r has fewer than 2 solutions; skipped", inst.id)
            continue
        usable.append(inst)
    if not usable:
        raise InvalidInputError("no instance provides at least two solutions")

    rng = np.random.default_rng(config.seed)
    if len(usable) > config.max_instances:
        picked = rng.choice(len(usable), size=config.max_instances, replace=False)
        usable = [usable[i] for i in sorted(picked)]

    # Classify every candidate pair of every sampled instance.
    per_instance: list[list[tuple[str, Solution, Solution]]] = []
    for inst in usable:
        pairs = []
        for s1, s2 in combinations(inst.solutions, 2):
            if s1.id == s2.id:
                continue
            pairs.append((structure_kind(s1, s2, config.measure_tolerance), s1, s2))
        per_instance.append(pairs)

    need = dict(config.structured_pair_quotas)
    taken: list[set[int]] = [set() for _ in per_instance]

    # First pass: satisfy quotas, instance order, earliest matching pair.
    for kind, quota in need.items():
        for _ in range(quota):
            found = False
            for i, pairs in enumerate(per_instance):
                if len(taken[i]) >= config.pairs_per_instance:
                    continue
                for j, (k, _s1, _s2) in enumerate(pairs):
                    if j in taken[i] or k != kind:
                        continue
                    taken[i].add(j)
                    found = True
                    break
                if found:
                    break
            if not found:
                break  # quota unreachable with the available material

    # Second pass: fill remaining per-instance capacity with random pairs.
    for i, pairs in enumerate(per_instance):
        free = [j for j in range(len(pairs)) if j not in taken[i]]
        room = config.pairs_per_instance - len(taken[i])
        if room <= 0 or not free:
            continue
        count = min(room, len(free))
        picked = rng.choice(len(free), size=count, replace=False)
        for p in picked:
            taken[i].add(free[p])

    # Emission is ordered by (instance, pair), not by selection pass.
    comparisons = []
    for i, inst in enumerate(usable):
        for j, (kind, s1, s2) in enumerate(per_instance[i]):
            if j in taken[i]:
                comparisons.append(
                    Comparison(
                        id=f"{inst.id}:{s1.id}:{s2.id}",
                        sol1=s1,
                        sol2=s2,
                        structure=kind,
                    )
                )
    return ComparisonSet(schema=schema, comparisons=tuple(comparisons))


def _structured_second(
    base: np.ndarray,
    kind: str,
    schema: MeasureSchema,
    tolerance: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Derive a second measure vector exhibiting the requested structure."""
    second = base.copy()
    if kind == "equal-vectors":
        return second
    n_change = 1 if kind == "one-measure-differs" else 2
    idx = rng.choice(len(base), size=n_change, replace=False)
    for k in idx:
        delta = rng.uniform(max(2.0 * tolerance, 5.0), 40.0)
        lo, hi = schema.val_min, schema.val_max
        if base[k] + delta <= hi and (base[k] - delta < lo or rng.random() < 0.5):
            second[k] = base[k] + delta
        else:
            second[k] = max(lo, base[k] - delta)
    return second


def synthesize_instances(
    schema: MeasureSchema,
    n_instances: int,
    solutions_per_instance: int = 2,
    structure_mix: dict[str, float] | None = None,
    seed: int = 0,
    measure_tolerance: float = 1.0,
) -> list[ProblemInstance]:
    """Random pre-measured instances for tests and simulations.

    ``structure_mix`` maps structure kinds to the fraction of instances
    guaranteed to contain a pair of that kind; the remainder (and all
    extra solutions) are unconstrained uniform draws.
    """
    if n_instances < 1:
        raise InvalidInputError("n_instances must be >= 1")
    if solutions_per_instance < 2:
        raise InvalidInputError("solutions_per_instance must be >= 2")
    mix = dict(structure_mix or {})
    if sum(mix.values()) > 1.0 + 1e-9:
        raise InvalidInputError("structure_mix fractions must sum to <= 1")

    rng = np.random.default_rng(seed)
    kinds: list[str | None] = []
    for kind, frac in mix.items():
        kinds.extend([kind] * round(frac * n_instances))
    kinds = kinds[:n_instances]
    kinds.extend([None] * (n_instances - len(kinds)))
    rng.shuffle(kinds)  # type: ignore[arg-type]

    lo, hi = schema.val_min, schema.val_max
    instances = []
    for i in range(n_instances):
        iid = f"inst{i:04d}"
        vectors = [rng.uniform(lo, hi, size=len(schema))]
        if kinds[i] is not None:
            vectors.append(
                _structured_second(vectors[0], kinds[i], schema, measure_tolerance, rng)
            )
        while len(vectors) < solutions_per_instance:
            vectors.append(rng.uniform(lo, hi, size=len(schema)))
        solutions = tuple(
            Solution(id=f"{iid}_s{j}", instance_id=iid, measures=tuple(float(v) for v in vec))
            for j, vec in enumerate(vectors[:solutions_per_instance])
        )
        instances.append(ProblemInstance(id=iid, description="synthetic", solutions=solutions))
    return instances
