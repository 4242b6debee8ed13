"""Simulated user: answers comparisons from a hidden ground-truth function.

Stands in for the human expert during closed-loop tests.  Verdicts are
derived per comparison from (seed, comparison id), so answers do not
depend on the order questions are asked in.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from .config import LearnConfig
from .elicitation import Session, default_pipeline, next_comparison, submit_preference
from .errors import InvalidInputError
from .generation import GenerationConfig, generate_comparisons
from .learner import LearnReport, learn_objective
from .model import Comparison, ComparisonSet, Preference, ProblemInstance, Verdict
from .objective import GlobalError, ObjectiveFunction, evaluate, global_error

__all__ = ["OracleConfig", "ClosedLoopConfig", "ClosedLoopResult", "oracle_prefer", "run_closed_loop"]


@dataclass(frozen=True)
class OracleConfig:
    ground_truth: ObjectiveFunction
    tie_band: float = 0.5
    flip_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.tie_band < 0:
            raise InvalidInputError("tie_band must be >= 0")
        if not 0.0 <= self.flip_probability <= 1.0:
            raise InvalidInputError("flip_probability must be in [0, 1]")


def _comparison_rng(seed: int, comparison_id: str) -> np.random.Generator:
    digest = hashlib.sha256(comparison_id.encode()).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "big")])


def oracle_prefer(oracle: OracleConfig, c: Comparison) -> Preference:
    """Answer one comparison from the hidden function.

    TIE inside the tie band; otherwise the higher-scored solution wins,
    inverted with ``flip_probability``.
    """
    g1 = evaluate(oracle.ground_truth, c.sol1)
    g2 = evaluate(oracle.ground_truth, c.sol2)
    if abs(g1 - g2) <= oracle.tie_band:
        return Preference(c.id, Verdict.TIE)
    verdict = Verdict.PREFER_SOL1 if g1 > g2 else Verdict.PREFER_SOL2
    if oracle.flip_probability > 0.0:
        rng = _comparison_rng(oracle.seed, c.id)
        if rng.random() < oracle.flip_probability:
            verdict = (
                Verdict.PREFER_SOL2 if verdict is Verdict.PREFER_SOL1 else Verdict.PREFER_SOL1
            )
    return Preference(c.id, verdict)


@dataclass(frozen=True)
class ClosedLoopConfig:
    generation: GenerationConfig = GenerationConfig()
    max_questions: int = 50
    test_comparisons: int = 50
    train_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.max_questions < 1:
            raise InvalidInputError("max_questions must be >= 1")
        if self.test_comparisons < 1:
            raise InvalidInputError("test_comparisons must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise InvalidInputError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class ClosedLoopResult:
    function: ObjectiveFunction
    report: LearnReport
    train: GlobalError
    test: GlobalError
    questions_asked: int


def run_closed_loop(
    instances: list[ProblemInstance],
    loop: ClosedLoopConfig,
    oracle: OracleConfig,
    learn: LearnConfig,
) -> ClosedLoopResult:
    """Elicit -> learn -> score on held-out comparisons, fully seeded.

    Instances are split disjointly; the oracle answers an interactive
    session over the training split, the learner fits the answered subset,
    and the learnt function is scored on fresh comparisons drawn from the
    held-out split.
    """
    if len(instances) < 2:
        raise InvalidInputError("need at least 2 instances for a train/test split")
    schema = oracle.ground_truth.schema
    rng = np.random.default_rng(loop.seed)
    order = rng.permutation(len(instances))
    n_train = max(1, int(loop.train_fraction * len(instances)))
    if n_train >= len(instances):
        n_train = len(instances) - 1
    train_instances = [instances[i] for i in sorted(order[:n_train])]
    test_instances = [instances[i] for i in sorted(order[n_train:])]

    train_set = generate_comparisons(train_instances, schema, loop.generation)
    pipeline = default_pipeline(schema, loop.max_questions)
    session = Session(
        set=train_set,
        pipeline=pipeline,
        max_questions=loop.max_questions,
        seed=loop.seed,
        measure_tolerance=loop.generation.measure_tolerance,
    )
    while True:
        comparison, session = next_comparison(session)
        if comparison is None:
            break
        session = submit_preference(session, oracle_prefer(oracle, comparison))

    answered = session.set.answered_subset()
    if not answered.comparisons:
        raise InvalidInputError("the session produced no answered comparisons")
    function, report = learn_objective(answered, learn)
    train_metrics = global_error(function, answered, learn)

    test_generation = replace(loop.generation, seed=loop.generation.seed + 1)
    test_pool = generate_comparisons(test_instances, schema, test_generation)
    if len(test_pool.comparisons) < loop.test_comparisons:
        raise InvalidInputError(
            f"held-out instances yielded {len(test_pool.comparisons)} comparisons, "
            f"need {loop.test_comparisons}"
        )
    test_comparisons = test_pool.comparisons[: loop.test_comparisons]
    test_set = ComparisonSet(
        schema=schema,
        comparisons=test_comparisons,
        preferences={c.id: oracle_prefer(oracle, c) for c in test_comparisons},
    )
    test_metrics = global_error(function, test_set, learn)

    return ClosedLoopResult(
        function=function,
        report=report,
        train=train_metrics,
        test=test_metrics,
        questions_asked=len(session.asked),
    )
