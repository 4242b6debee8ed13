"""Measure-space partitioning via grow-and-prune sequential covering.

When no single weight vector fits all preferences, solutions touched by
incompatible comparisons mark the regions that behave differently.  An
IREP-style inducer learns conjunctive threshold rules for that
"incompatible" class; each induced condition becomes a new partition (a
new regression rule) placed ahead of the existing ones.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import LearnConfig, PartitionConfig
from .model import ComparisonSet, MeasureSchema
from .objective import CATCH_ALL, Clause, ObjectiveFunction, RuleCondition, comp

__all__ = ["Label", "LabeledExample", "label_solutions", "induce_rules", "refine_partitions"]


class Label(str, enum.Enum):
    COMPATIBLE = "COMPATIBLE"
    INCOMPATIBLE = "INCOMPATIBLE"


@dataclass(frozen=True)
class LabeledExample:
    measures: tuple[float, ...]
    label: Label


def label_solutions(
    fn: ObjectiveFunction, cset: ComparisonSet, config: LearnConfig
) -> list[LabeledExample]:
    """Two examples per comparison, labeled by that comparison's compatibility.

    A solution appearing in several comparisons contributes one example per
    appearance, preserving comparison weighting.
    """
    out = []
    for c in cset.comparisons:
        pref = cset.preferences[c.id]
        label = (
            Label.INCOMPATIBLE
            if comp(c, fn, pref, config.tie_epsilon) == 1
            else Label.COMPATIBLE
        )
        out.append(LabeledExample(measures=c.sol1.measures, label=label))
        out.append(LabeledExample(measures=c.sol2.measures, label=label))
    return out


def _covers(clauses: list[Clause], x: np.ndarray, schema: MeasureSchema) -> np.ndarray:
    mask = np.ones(len(x), dtype=bool)
    for cl in clauses:
        col = x[:, schema.index_of(cl.measure_id)]
        if cl.relation == "<":
            mask &= col < cl.threshold
        elif cl.relation == "<=":
            mask &= col <= cl.threshold
        elif cl.relation == ">":
            mask &= col > cl.threshold
        else:
            mask &= col >= cl.threshold
    return mask


def _foil_gain(p0: int, n0: int, p1: int, n1: int) -> float:
    # Gain of specialising a rule from (p0, n0) coverage to (p1, n1).
    if p1 == 0:
        return -math.inf
    return p1 * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


def _grow_rule(
    x: np.ndarray,
    y: np.ndarray,
    schema: MeasureSchema,
    config: PartitionConfig,
) -> list[Clause]:
    """Greedily add the threshold clause with the best information gain."""
    clauses: list[Clause] = []
    covered = np.ones(len(x), dtype=bool)
    while len(clauses) < config.max_clauses_per_rule:
        p0 = int((y & covered).sum())
        n0 = int((~y & covered).sum())
        if p0 == 0 or n0 == 0:
            break
        best, best_gain = None, 0.0
        for j in range(x.shape[1]):
            values = np.unique(x[covered, j])
            if len(values) < 2:
                continue
            midpoints = (values[:-1] + values[1:]) / 2.0
            for t in midpoints:
                below = covered & (x[:, j] < t)
                for relation, mask in (("<", below), (">=", covered & ~below)):
                    p1 = int((y & mask).sum())
                    n1 = int((~y & mask).sum())
                    gain = _foil_gain(p0, n0, p1, n1)
                    if gain > best_gain:
                        best_gain = gain
                        best = Clause(schema.measures[j].id, relation, float(t))
        if best is None:
            break
        clauses.append(best)
        covered = _covers(clauses, x, schema)
    return clauses


def _prune_value(clauses: list[Clause], x: np.ndarray, y: np.ndarray, schema) -> float:
    mask = _covers(clauses, x, schema)
    p = int((y & mask).sum())
    n = int((~y & mask).sum())
    if p + n == 0:
        return -1.0
    return (p - n) / (p + n)


def induce_rules(
    schema: MeasureSchema,
    examples: list[LabeledExample],
    config: PartitionConfig = PartitionConfig(),
    seed: int = 0,
) -> list[RuleCondition]:
    """Sequential covering for the INCOMPATIBLE class.

    Each iteration grows a conjunctive rule on a grow split, prunes it back
    on a held-out split (dropping trailing clauses), and removes every
    example the accepted rule covers.  Stops when a candidate rule has
    non-positive held-out value, covers too few examples, or ``max_rules``
    is reached.  Returns the induced conditions followed by a catch-all;
    with no structure to find, the catch-all alone.
    """
    x = np.array([e.measures for e in examples], dtype=float)
    y = np.array([e.label is Label.INCOMPATIBLE for e in examples], dtype=bool)
    rules: list[RuleCondition] = []
    rng = np.random.default_rng(seed)
    remaining = np.arange(len(examples))

    while len(rules) < config.max_rules:
        ys = y[remaining]
        if not ys.any() or ys.all():
            break
        grow_idx, prune_idx = _split(remaining, y, config.prune_holdout_fraction, rng)
        clauses = _grow_rule(x[grow_idx], y[grow_idx], schema, config)
        if not clauses:
            break
        if len(prune_idx):
            # Keep the clause prefix with the best held-out value.
            best_k, best_v = 0, -math.inf
            for k in range(1, len(clauses) + 1):
                v = _prune_value(clauses[:k], x[prune_idx], y[prune_idx], schema)
                if v > best_v:
                    best_k, best_v = k, v
            clauses = clauses[:best_k]
        else:
            best_v = _prune_value(clauses, x[grow_idx], y[grow_idx], schema)
        if best_v <= 0.0:
            break
        mask = _covers(clauses, x[remaining], schema)
        if int(mask.sum()) < config.min_rule_coverage:
            break
        rules.append(RuleCondition(clauses=tuple(clauses)))
        remaining = remaining[~mask]
        if len(remaining) == 0:
            break

    return rules + [CATCH_ALL]


def _split(
    indices: np.ndarray, y: np.ndarray, holdout: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Stratified grow/prune split so the rare class reaches both sides."""
    grow, prune = [], []
    for cls in (False, True):
        members = indices[y[indices] == cls]
        perm = rng.permutation(len(members))
        k = int(holdout * len(members))
        prune.extend(members[perm[:k]])
        grow.extend(members[perm[k:]])
    if not grow:  # degenerate tiny input: grow on everything
        return indices.copy(), np.array(prune, dtype=int)
    return np.array(sorted(grow), dtype=int), np.array(sorted(prune), dtype=int)


def refine_partitions(
    current_conditions: list[RuleCondition],
    fn: ObjectiveFunction,
    cset: ComparisonSet,
    config: LearnConfig,
    seed: int = 0,
) -> list[RuleCondition]:
    """Prepend freshly induced incompatible-region conditions.

    The previous conditions (and therefore the catch-all) are always kept,
    so refinement never loses coverage.  Returns the input list unchanged
    when nothing new was induced.
    """
    examples = label_solutions(fn, cset, config)
    if not any(e.label is Label.INCOMPATIBLE for e in examples):
        return list(current_conditions)
    induced = induce_rules(cset.schema, examples, config.partition, seed=seed)[:-1]
    fresh = [c for c in induced if c not in current_conditions]
    if not fresh:
        return list(current_conditions)
    return fresh + list(current_conditions)
