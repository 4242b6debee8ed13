"""The interactive capture loop: pick a comparison, record the verdict, repeat.

Four selection strategies are chained into a pipeline: first a consistency
probe on equal-vector pairs, then per-measure evolution questions, then
per-measure-pair importance-order questions, then random fill.  A stage
with no matching unasked comparison (or an exhausted budget) is skipped
silently; the skip is noted in the session log.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .errors import InvalidInputError, ProtocolError
from .model import Comparison, ComparisonSet, MeasureSchema, Preference, Verdict

__all__ = [
    "StrategyKind",
    "Strategy",
    "StrategyPipeline",
    "Session",
    "default_pipeline",
    "next_comparison",
    "submit_preference",
    "consistency_flags",
    "equal_vector_flags",
]


class StrategyKind(str, enum.Enum):
    CONSISTENCY = "CONSISTENCY"
    EVOLUTION = "EVOLUTION"
    ORDER = "ORDER"
    RANDOM = "RANDOM"


@dataclass(frozen=True)
class Strategy:
    kind: StrategyKind
    measures: tuple[str, ...] = ()

    def __post_init__(self):
        if isinstance(self.measures, list):
            object.__setattr__(self, "measures", tuple(self.measures))
        expected = {
            StrategyKind.CONSISTENCY: 0,
            StrategyKind.EVOLUTION: 1,
            StrategyKind.ORDER: 2,
            StrategyKind.RANDOM: 0,
        }[self.kind]
        if len(self.measures) != expected:
            raise InvalidInputError(
                f"{self.kind.value} takes {expected} measure id(s), got {self.measures}"
            )
        if self.kind is StrategyKind.ORDER and self.measures[0] == self.measures[1]:
            raise InvalidInputError("ORDER needs two distinct measures")

    def label(self) -> str:
        if self.measures:
            return f"{self.kind.value}({', '.join(self.measures)})"
        return self.kind.value

    def accepts(self, c: Comparison, schema: MeasureSchema, tolerance: float) -> bool:
        """Does this comparison match the strategy's structure filter?"""
        if self.kind is StrategyKind.RANDOM:
            return True
        changed = {
            schema.measures[k].id
            for k, (a, b) in enumerate(zip(c.sol1.measures, c.sol2.measures))
            if abs(a - b) > tolerance
        }
        if self.kind is StrategyKind.CONSISTENCY:
            return not changed
        return changed == set(self.measures)


@dataclass(frozen=True)
class StrategyPipeline:
    """Ordered (strategy, budget) stages; budgets bound questions per stage."""

    stages: tuple[tuple[Strategy, int], ...]

    def __post_init__(self):
        if isinstance(self.stages, list):
            object.__setattr__(self, "stages", tuple(tuple(s) for s in self.stages))
        if any(b < 0 for _, b in self.stages):
            raise InvalidInputError("stage budgets must be >= 0")
        if sum(b for _, b in self.stages) < 1:
            raise InvalidInputError("pipeline needs a total budget of at least 1")


def default_pipeline(schema: MeasureSchema, max_questions: int = 50) -> StrategyPipeline:
    """The recommended chaining: consistency, evolution per measure,
    order per measure pair, then random with the leftover budget."""
    stages: list[tuple[Strategy, int]] = [(Strategy(StrategyKind.CONSISTENCY), 1)]
    for m in schema.measure_ids:
        stages.append((Strategy(StrategyKind.EVOLUTION, (m,)), 1))
    for m, n in combinations(schema.measure_ids, 2):
        stages.append((Strategy(StrategyKind.ORDER, (m, n)), 1))
    random_budget = max(max_questions - len(stages), 1)
    stages.append((Strategy(StrategyKind.RANDOM), random_budget))
    return StrategyPipeline(tuple(stages))


@dataclass(frozen=True)
class Session:
    """Live elicitation state.  Immutable: each submit returns a new value.

    One logical actor per session: there is at most one outstanding
    question (``pending``), and ``asked`` only grows on submission.
    """

    set: ComparisonSet
    pipeline: StrategyPipeline
    max_questions: int
    seed: int = 0
    measure_tolerance: float = 1.0
    asked: tuple[str, ...] = ()
    asked_stages: tuple[int, ...] = ()
    pending: str | None = None
    pending_stage: int | None = None
    stage_index: int = 0
    stage_used: int = 0
    picks_made: int = 0
    log: tuple[str, ...] = ()

    def finished(self) -> bool:
        return self.pending is None and (
            len(self.asked) >= self.max_questions or self.stage_index >= len(self.pipeline.stages)
        )

    def current_stage_label(self) -> str | None:
        if self.pending_stage is not None:
            return self.pipeline.stages[self.pending_stage][0].label()
        if self.stage_index < len(self.pipeline.stages):
            return self.pipeline.stages[self.stage_index][0].label()
        return None


def _pick(session: Session, candidates: list[Comparison]) -> Comparison:
    # Fresh generator per pick keyed on (seed, pick counter): deterministic
    # and unaffected by suspend/resume.
    rng = np.random.default_rng([session.seed, session.picks_made])
    ordered = sorted(candidates, key=lambda c: c.id)
    return ordered[int(rng.integers(len(ordered)))]


def next_comparison(session: Session) -> tuple[Comparison | None, Session]:
    """Select the next question, or ``(None, session)`` when finished.

    Re-calling with an outstanding question returns that same question, so
    the operation is safe to retry.
    """
    if session.pending is not None:
        return session.set.comparison(session.pending), session
    if len(session.asked) >= session.max_questions:
        return None, session

    asked = set(session.asked)
    stage_index = session.stage_index
    stage_used = session.stage_used
    log = list(session.log)
    while stage_index < len(session.pipeline.stages):
        strategy, budget = session.pipeline.stages[stage_index]
        if stage_used >= budget:
            stage_index += 1
            stage_used = 0
            continue
        candidates = [
            c
            for c in session.set.comparisons
            if c.id not in asked
            and c.id not in session.set.preferences
            and strategy.accepts(c, session.set.schema, session.measure_tolerance)
        ]
        if not candidates:
            log.append(f"stage {strategy.label()} skipped: no matching comparison")
            stage_index += 1
            stage_used = 0
            continue
        picked = _pick(session, candidates)
        updated = replace(
            session,
            pending=picked.id,
            pending_stage=stage_index,
            stage_index=stage_index,
            stage_used=stage_used + 1,
            picks_made=session.picks_made + 1,
            log=tuple(log),
        )
        return picked, updated

    return None, replace(session, stage_index=stage_index, stage_used=0, log=tuple(log))


def submit_preference(session: Session, pref: Preference) -> Session:
    """Record the verdict for the outstanding question."""
    session.set.comparison(pref.comparison_id)  # unknown id -> InvalidInputError
    if session.pending is None:
        raise ProtocolError("no outstanding comparison; call next_comparison first")
    if pref.comparison_id != session.pending:
        raise ProtocolError(
            f"expected verdict for {session.pending!r}, got {pref.comparison_id!r}"
        )
    if pref.comparison_id in session.set.preferences:
        raise ProtocolError(f"comparison {pref.comparison_id!r} already answered")
    return replace(
        session,
        set=session.set.with_preference(pref),
        asked=session.asked + (pref.comparison_id,),
        asked_stages=session.asked_stages + (session.pending_stage,),
        pending=None,
        pending_stage=None,
    )


def consistency_flags(session: Session) -> list[str]:
    """Ids of consistency-stage questions answered with a non-tie verdict.

    Each flag means the user distinguished two solutions the measures
    cannot tell apart -- evidence the measure set is insufficient.
    """
    flags = []
    for cid, stage in zip(session.asked, session.asked_stages):
        strategy, _ = session.pipeline.stages[stage]
        if strategy.kind is not StrategyKind.CONSISTENCY:
            continue
        pref = session.set.preferences.get(cid)
        if pref is not None and pref.verdict is not Verdict.TIE:
            flags.append(cid)
    return flags


def equal_vector_flags(cset: ComparisonSet, tolerance: float = 1.0) -> list[str]:
    """Session-free variant: answered equal-vector pairs with non-tie verdicts."""
    flags = []
    for c in cset.comparisons:
        pref = cset.preferences.get(c.id)
        if pref is None or pref.verdict is Verdict.TIE:
            continue
        deltas = [abs(a - b) for a, b in zip(c.sol1.measures, c.sol2.measures)]
        if all(d <= tolerance for d in deltas):
            flags.append(c.id)
    return flags
