"""Core data model: measures, solutions, instances, comparisons, preferences.

All types are frozen dataclasses; instances are safe to share between
threads.  Construction performs only cheap local checks -- cross-object
invariants (bounds, id wiring) are reported by :func:`validate`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import InvalidInputError

__all__ = [
    "Measure",
    "MeasureSchema",
    "Solution",
    "ProblemInstance",
    "Comparison",
    "Verdict",
    "Preference",
    "ComparisonSet",
    "STRUCTURE_KINDS",
    "structure_kind",
    "validate",
]

# Structure tags attached to comparisons by the generation module and
# consumed by the elicitation strategies.
STRUCTURE_KINDS = (
    "equal-vectors",
    "one-measure-differs",
    "two-measures-differ",
    "unconstrained",
)


@dataclass(frozen=True)
class Measure:
    id: str
    label: str = ""


@dataclass(frozen=True)
class MeasureSchema:
    """Ordered measure descriptors plus the global value bounds."""

    measures: tuple[Measure, ...]
    val_min: float = 0.0
    val_max: float = 100.0
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if isinstance(self.measures, list):
            object.__setattr__(self, "measures", tuple(self.measures))
        if not self.measures:
            raise InvalidInputError("schema needs at least one measure")
        ids = [m.id for m in self.measures]
        if any(not i for i in ids):
            raise InvalidInputError("measure ids must be non-empty")
        if len(set(ids)) != len(ids):
            raise InvalidInputError(f"duplicate measure ids: {ids}")
        if not self.val_min < self.val_max:
            raise InvalidInputError(
                f"val_min must be below val_max, got [{self.val_min}, {self.val_max}]"
            )
        object.__setattr__(self, "_index", {m.id: k for k, m in enumerate(self.measures)})

    @property
    def measure_ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.measures)

    def index_of(self, measure_id: str) -> int:
        try:
            return self._index[measure_id]
        except KeyError:
            raise InvalidInputError(f"unknown measure id: {measure_id!r}") from None

    def __len__(self) -> int:
        return len(self.measures)


@dataclass(frozen=True)
class Solution:
    """One candidate answer, described purely by its measure vector.

    ``display`` is an opaque payload (e.g. an SVG fragment) carried through
    to UIs; the core never interprets it.
    """

    id: str
    instance_id: str
    measures: tuple[float, ...]
    display: str | None = None

    def __post_init__(self):
        if isinstance(self.measures, list):
            object.__setattr__(self, "measures", tuple(float(v) for v in self.measures))


@dataclass(frozen=True)
class ProblemInstance:
    id: str
    description: str = ""
    solutions: tuple[Solution, ...] = ()

    def __post_init__(self):
        if isinstance(self.solutions, list):
            object.__setattr__(self, "solutions", tuple(self.solutions))


@dataclass(frozen=True)
class Comparison:
    """Two solutions of one problem instance, shown together to the user."""

    id: str
    sol1: Solution
    sol2: Solution
    structure: str | None = None  # tag from STRUCTURE_KINDS, set by generation


class Verdict(str, enum.Enum):
    PREFER_SOL1 = "PREFER_SOL1"
    PREFER_SOL2 = "PREFER_SOL2"
    TIE = "TIE"


@dataclass(frozen=True)
class Preference:
    comparison_id: str
    verdict: Verdict


@dataclass(frozen=True)
class ComparisonSet:
    """A batch of comparisons plus the (possibly partial) recorded verdicts."""

    schema: MeasureSchema
    comparisons: tuple[Comparison, ...]
    preferences: dict[str, Preference] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.comparisons, list):
            object.__setattr__(self, "comparisons", tuple(self.comparisons))

    def comparison(self, comparison_id: str) -> Comparison:
        for c in self.comparisons:
            if c.id == comparison_id:
                return c
        raise InvalidInputError(f"unknown comparison id: {comparison_id!r}")

    def with_preference(self, pref: Preference) -> "ComparisonSet":
        prefs = dict(self.preferences)
        prefs[pref.comparison_id] = pref
        return ComparisonSet(self.schema, self.comparisons, prefs)

    def answered_subset(self) -> "ComparisonSet":
        """The sub-set containing only comparisons that have a verdict."""
        kept = tuple(c for c in self.comparisons if c.id in self.preferences)
        prefs = {c.id: self.preferences[c.id] for c in kept}
        return ComparisonSet(self.schema, kept, prefs)

    def fully_answered(self) -> bool:
        return all(c.id in self.preferences for c in self.comparisons)


def structure_kind(sol1: Solution, sol2: Solution, tolerance: float) -> str:
    """Classify a pair by how many measure values differ beyond ``tolerance``."""
    changed = sum(
        1 for a, b in zip(sol1.measures, sol2.measures) if abs(a - b) > tolerance
    )
    if changed == 0:
        return "equal-vectors"
    if changed == 1:
        return "one-measure-differs"
    if changed == 2:
        return "two-measures-differ"
    return "unconstrained"


def _check_solution(sol: Solution, schema: MeasureSchema, where: str, out: list[str]):
    if len(sol.measures) != len(schema):
        out.append(
            f"{where}: solution {sol.id!r} has {len(sol.measures)} measure values, "
            f"schema has {len(schema)}"
        )
        return
    for k, v in enumerate(sol.measures):
        if not (schema.val_min <= v <= schema.val_max):
            out.append(
                f"{where}: solution {sol.id!r} measure {schema.measures[k].id!r} "
                f"value {v} outside [{schema.val_min}, {schema.val_max}]"
            )


def validate(cset: ComparisonSet) -> list[str]:
    """Return human-readable descriptions of every invariant violation.

    Pure: the same set always yields the same list.  An empty list means the
    set is well-formed.
    """
    out: list[str] = []
    seen_ids: set[str] = set()
    for i, c in enumerate(cset.comparisons):
        where = f"comparisons[{i}]"
        if c.id in seen_ids:
            out.append(f"{where}: duplicate comparison id {c.id!r}")
        seen_ids.add(c.id)
        if c.sol1.id == c.sol2.id:
            out.append(f"{where}: the two solutions share id {c.sol1.id!r}")
        if c.sol1.instance_id != c.sol2.instance_id:
            out.append(
                f"{where}: solutions belong to different instances "
                f"({c.sol1.instance_id!r} vs {c.sol2.instance_id!r})"
            )
        if c.structure is not None and c.structure not in STRUCTURE_KINDS:
            out.append(f"{where}: unknown structure tag {c.structure!r}")
        _check_solution(c.sol1, cset.schema, where, out)
        _check_solution(c.sol2, cset.schema, where, out)
    for cid, pref in cset.preferences.items():
        if cid not in seen_ids:
            out.append(f"preferences[{cid!r}]: no comparison with this id")
        if pref.comparison_id != cid:
            out.append(
                f"preferences[{cid!r}]: preference carries mismatched id "
                f"{pref.comparison_id!r}"
            )
    return out
