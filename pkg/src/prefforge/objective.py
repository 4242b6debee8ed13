"""Rule-based objective functions and the preference compatibility metrics.

An objective function is an ordered list of regression rules evaluated
first-match; each rule scores a solution as the weighted mean of its
measure values.  The compatibility/error metrics quantify how well a
function agrees with recorded user preferences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .config import LearnConfig
from .errors import InvalidInputError
from .model import Comparison, ComparisonSet, MeasureSchema, Preference, Solution, Verdict

__all__ = [
    "RELATIONS",
    "Clause",
    "RuleCondition",
    "RegressionRule",
    "ObjectiveFunction",
    "GlobalError",
    "evaluate",
    "comp",
    "error",
    "global_error",
    "render_rules",
]

RELATIONS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class Clause:
    measure_id: str
    relation: str
    threshold: float

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise InvalidInputError(f"unknown relation {self.relation!r}")

    def holds(self, value: float) -> bool:
        if self.relation == "<":
            return value < self.threshold
        if self.relation == "<=":
            return value <= self.threshold
        if self.relation == ">":
            return value > self.threshold
        return value >= self.threshold


@dataclass(frozen=True)
class RuleCondition:
    """Conjunction of threshold clauses; an empty conjunction always holds."""

    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        if isinstance(self.clauses, list):
            object.__setattr__(self, "clauses", tuple(self.clauses))

    @property
    def is_catch_all(self) -> bool:
        return not self.clauses

    def matches(self, sol: Solution, schema: MeasureSchema) -> bool:
        return all(cl.holds(sol.measures[schema.index_of(cl.measure_id)]) for cl in self.clauses)


CATCH_ALL = RuleCondition()


@dataclass(frozen=True)
class RegressionRule:
    condition: RuleCondition
    weights: tuple[int, ...]

    def __post_init__(self):
        if isinstance(self.weights, list):
            object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if any(w < 0 for w in self.weights):
            raise InvalidInputError(f"weights must be non-negative, got {self.weights}")
        if sum(self.weights) <= 0:
            raise InvalidInputError("at least one weight must be positive")


@dataclass(frozen=True)
class ObjectiveFunction:
    """Ordered regression rules; the last rule must be a catch-all."""

    schema: MeasureSchema
    rules: tuple[RegressionRule, ...]

    def __post_init__(self):
        if isinstance(self.rules, list):
            object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise InvalidInputError("an objective function needs at least one rule")
        if not self.rules[-1].condition.is_catch_all:
            raise InvalidInputError("the final rule must have an empty condition")
        for r, rule in enumerate(self.rules):
            if len(rule.weights) != len(self.schema):
                raise InvalidInputError(
                    f"rules[{r}]: {len(rule.weights)} weights for "
                    f"{len(self.schema)} measures"
                )
            for cl in rule.condition.clauses:
                self.schema.index_of(cl.measure_id)
                if not (self.schema.val_min <= cl.threshold <= self.schema.val_max):
                    raise InvalidInputError(
                        f"rules[{r}]: threshold {cl.threshold} outside "
                        f"[{self.schema.val_min}, {self.schema.val_max}]"
                    )

    def matching_rule_index(self, sol: Solution) -> int:
        for k, rule in enumerate(self.rules):
            if rule.condition.matches(sol, self.schema):
                return k
        raise AssertionError("unreachable: final rule is a catch-all")


def evaluate(fn: ObjectiveFunction, sol: Solution) -> float:
    """Score ``sol`` with the first rule whose condition it satisfies.

    The weighted mean of values in [val_min, val_max] stays in those
    bounds, so the result needs no clipping.
    """
    if len(sol.measures) != len(fn.schema):
        raise InvalidInputError(
            f"solution {sol.id!r} has {len(sol.measures)} measure values, "
            f"schema has {len(fn.schema)}"
        )
    rule = fn.rules[fn.matching_rule_index(sol)]
    total = 0.0
    for w, v in zip(rule.weights, sol.measures):
        total += w * v
    return total / sum(rule.weights)


def _compatible(diff: float, verdict: Verdict, tie_epsilon: float) -> bool:
    # diff = f(sol1) - f(sol2)
    if verdict is Verdict.TIE:
        return abs(diff) <= tie_epsilon
    if verdict is Verdict.PREFER_SOL1:
        return diff > tie_epsilon
    return -diff > tie_epsilon


def comp(c: Comparison, fn: ObjectiveFunction, p: Preference, tie_epsilon: float = 0.5) -> int:
    """0 when the verdict agrees with the function's ordering, else 1."""
    diff = evaluate(fn, c.sol1) - evaluate(fn, c.sol2)
    return 0 if _compatible(diff, p.verdict, tie_epsilon) else 1


def error(c: Comparison, fn: ObjectiveFunction, p: Preference, config: LearnConfig) -> float:
    """0 for a compatible comparison, else val_error plus the score gap."""
    diff = evaluate(fn, c.sol1) - evaluate(fn, c.sol2)
    if _compatible(diff, p.verdict, config.tie_epsilon):
        return 0.0
    return config.val_error + abs(diff)


class GlobalError(NamedTuple):
    error: float
    incompatible: int


def global_error(fn: ObjectiveFunction, cset: ComparisonSet, config: LearnConfig) -> GlobalError:
    """Mean per-comparison error over the whole set, plus the mismatch count."""
    if not cset.comparisons:
        raise InvalidInputError("global error is undefined on an empty comparison set")
    total = 0.0
    bad = 0
    for c in cset.comparisons:
        pref = cset.preferences.get(c.id)
        if pref is None:
            raise InvalidInputError(f"comparison {c.id!r} has no recorded preference")
        e = error(c, fn, pref, config)
        total += e
        if e > 0.0:
            bad += 1
    return GlobalError(total / len(cset.comparisons), bad)


def _format_number(x: float) -> str:
    return f"{x:g}"


def _render_condition(cond: RuleCondition) -> str:
    if cond.is_catch_all:
        return "true"
    # Collapse a (>= a, < b) pair on one measure into "a <= m < b".
    if len(cond.clauses) == 2:
        a, b = cond.clauses
        if a.measure_id == b.measure_id:
            lo, hi = None, None
            for cl in (a, b):
                if cl.relation == ">=":
                    lo = cl
                elif cl.relation == "<":
                    hi = cl
            if lo is not None and hi is not None:
                return (
                    f"{_format_number(lo.threshold)} <= {lo.measure_id} "
                    f"< {_format_number(hi.threshold)}"
                )
    return " and ".join(
        f"{cl.measure_id} {cl.relation} {_format_number(cl.threshold)}"
        for cl in cond.clauses
    )


def render_rules(fn: ObjectiveFunction) -> str:
    """Human-readable one-line-per-rule rendering.

    Zero-weight measures are omitted from the sum.  Output is stable for
    stable input.
    """
    lines = []
    for rule in fn.rules:
        denom = sum(rule.weights)
        terms = " + ".join(
            f"{w}*{m.id}"
            for w, m in zip(rule.weights, fn.schema.measures)
            if w > 0
        )
        lines.append(f"if ({_render_condition(rule.condition)}) => S = (1/{denom})({terms})")
    return "\n".join(lines)
