"""The refinement loop: search weights, partition, re-search, keep or backtrack.

Starts from a single catch-all rule.  Each round either proves the current
function perfect (error 0), fails to find a new partition, or runs a joint
weight search over the extended condition list; the extension is kept only
if it strictly lowers the global error, otherwise the previous function
stands and the loop ends.  Strict improvement plus finitely many
achievable errors guarantees termination.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import LearnConfig
from .elicitation import equal_vector_flags
from .errors import InvalidInputError
from .model import ComparisonSet
from .objective import ObjectiveFunction, RuleCondition
from .partitioner import refine_partitions
from .weight_search import CompiledSample, search_weights
from . import model

__all__ = ["LearnIteration", "LearnReport", "learn_objective"]


@dataclass(frozen=True)
class LearnIteration:
    rules: int
    global_error: float
    incompatible: int
    accepted: bool


@dataclass(frozen=True)
class LearnReport:
    iterations: tuple[LearnIteration, ...]
    accepted_errors: tuple[float, ...]
    final_error: float
    final_incompatible: int
    consistency_flags: tuple[str, ...]
    refinement_cap_hit: bool = False
    wall_time_s: float | None = None  # volatile; excluded from serialized form


def _expanded_seed_genome(
    old_fn: ObjectiveFunction,
    old_conditions: list[RuleCondition],
    new_conditions: list[RuleCondition],
    cset: ComparisonSet,
    config: LearnConfig,
) -> np.ndarray:
    """Carry the previous optimum into the enlarged genome.

    Each fresh condition block copies the weights of the old rule that
    covered most of the training solutions it captures (the old catch-all
    when it captures none).  When refining from a single catch-all this
    reproduces the previous function exactly, so the joint search starts
    no worse than the pre-partition optimum.
    """
    n_new = len(new_conditions) - len(old_conditions)
    old_w = np.array([r.weights for r in old_fn.rules], dtype=np.int64)
    new_sample = CompiledSample(new_conditions, cset, config)
    old_sample = CompiledSample(old_conditions, cset, config)
    new_match = np.concatenate([new_sample.r1, new_sample.r2])
    old_match = np.concatenate([old_sample.r1, old_sample.r2])

    blocks = []
    for j in range(n_new):
        captured_old = old_match[new_match == j]
        if len(captured_old):
            counts = np.bincount(captured_old, minlength=len(old_conditions))
            blocks.append(old_w[int(counts.argmax())])
        else:
            blocks.append(old_w[-1])
    return np.vstack(blocks + [old_w])


def learn_objective(
    cset: ComparisonSet, config: LearnConfig = LearnConfig()
) -> tuple[ObjectiveFunction, LearnReport]:
    """Learn a rule-based objective function from a fully answered set."""
    problems = model.validate(cset)
    if problems:
        raise InvalidInputError("comparison set is invalid: " + "; ".join(problems))
    if not cset.comparisons:
        raise InvalidInputError("cannot learn from an empty comparison set")
    if not cset.fully_answered():
        raise InvalidInputError("every comparison needs a preference before learning")

    started = time.perf_counter()
    conditions: list[RuleCondition] = [RuleCondition()]
    current = search_weights(conditions, cset, config)
    iterations = [
        LearnIteration(
            rules=1,
            global_error=current.global_error,
            incompatible=current.incompatible,
            accepted=True,
        )
    ]
    accepted_errors = [current.global_error]
    cap_hit = False

    depth = 0
    while current.global_error > 0.0:
        if depth >= config.max_refinements:
            cap_hit = True
            break
        new_conditions = refine_partitions(
            conditions, current.function, cset, config, seed=config.seed + depth
        )
        if new_conditions == conditions:
            break
        seed_genome = _expanded_seed_genome(
            current.function, conditions, new_conditions, cset, config
        )
        iteration_config = LearnConfig(
            val_error=config.val_error,
            tie_epsilon=config.tie_epsilon,
            ga=config.ga,
            partition=config.partition,
            max_refinements=config.max_refinements,
            seed=config.seed + depth + 1,
        )
        candidate = search_weights(
            new_conditions, cset, iteration_config, seed_genomes=[seed_genome]
        )
        accepted = candidate.global_error < current.global_error
        iterations.append(
            LearnIteration(
                rules=len(new_conditions),
                global_error=candidate.global_error,
                incompatible=candidate.incompatible,
                accepted=accepted,
            )
        )
        if not accepted:
            break  # backtrack: the previous function stands
        current = candidate
        conditions = new_conditions
        accepted_errors.append(current.global_error)
        depth += 1

    report = LearnReport(
        iterations=tuple(iterations),
        accepted_errors=tuple(accepted_errors),
        final_error=current.global_error,
        final_incompatible=current.incompatible,
        consistency_flags=tuple(equal_vector_flags(cset)),
        refinement_cap_hit=cap_hit,
        wall_time_s=time.perf_counter() - started,
    )
    return current.function, report
