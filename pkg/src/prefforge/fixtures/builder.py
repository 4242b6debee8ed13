"""Deterministic construction of the building-generalisation fixture.

Six constraint-satisfaction measures on a 0-100 scale describe each
generalised building outline.  The bundled three-rule function switches on
the convexity satisfaction at 83 and 93 (the last rule is the catch-all
covering convexity >= 93).

Each set holds 50 comparisons: a few equal-vector ties, a controlled batch
of five incompatible pairs whose score gaps are chosen exactly (2.5 each on
the learning set; 6.5/6.0/6.5/6.0/6.5 on the test set), and compatible
pairs with a score margin of at least 1.  With a 40-point incompatibility
penalty the means come out at exactly 4.25 and 4.63.
"""

from __future__ import annotations

import numpy as np

from ..model import Comparison, ComparisonSet, Measure, MeasureSchema, Preference, Solution, Verdict
from ..objective import Clause, ObjectiveFunction, RegressionRule, RuleCondition, evaluate

__all__ = ["building_schema", "building_function", "build_learning_set", "build_test_set"]

# Schema order mirrors the rendered function: convexity first, size last.
_MEASURES = (
    ("convexity", "Convexity preservation"),
    ("elongation", "Elongation preservation"),
    ("squareness", "Squareness of near-square angles"),
    ("granularity", "Absence of too-small details"),
    ("orientation", "Orientation preservation"),
    ("size", "Readable building size"),
)

CV, EL, SQ, GR, OR, SZ = range(6)


def building_schema() -> MeasureSchema:
    return MeasureSchema(
        measures=tuple(Measure(id=i, label=l) for i, l in _MEASURES),
        val_min=0.0,
        val_max=100.0,
    )


def building_function() -> ObjectiveFunction:
    schema = building_schema()
    return ObjectiveFunction(
        schema=schema,
        rules=(
            RegressionRule(
                condition=RuleCondition((Clause("convexity", "<", 83.0),)),
                weights=(6, 2, 9, 2, 2, 7),
            ),
            RegressionRule(
                condition=RuleCondition(
                    (Clause("convexity", ">=", 83.0), Clause("convexity", "<", 93.0))
                ),
                weights=(7, 7, 1, 7, 0, 6),
            ),
            RegressionRule(condition=RuleCondition(), weights=(9, 9, 3, 2, 0, 7)),
        ),
    )


# (region, {measure index: exact integer drop applied to sol2}, verdict)
# Drops are sized so the weighted-mean gap is exact: learning pairs each
# lose 2.5 points, test pairs 6.5/6.0/6.5/6.0/6.5.
_LEARNING_INCOMPATIBLE = (
    (1, {SZ: 10}, Verdict.PREFER_SOL2),           # 7*10 / 28   = 2.5
    (1, {SQ: 6, OR: 8}, Verdict.TIE),             # (54+16)/28  = 2.5
    (2, {GR: 10}, Verdict.PREFER_SOL2),           # 7*10 / 28   = 2.5
    (3, {CV: 7, GR: 6}, Verdict.TIE),             # (63+12)/30  = 2.5
    (1, {EL: 21, SZ: 4}, Verdict.PREFER_SOL2),    # (42+28)/28  = 2.5
)
_TEST_INCOMPATIBLE = (
    (1, {SZ: 26}, Verdict.PREFER_SOL2),           # 182/28 = 6.5
    (1, {SQ: 14, EL: 21}, Verdict.PREFER_SOL2),   # 168/28 = 6.0
    (2, {GR: 26}, Verdict.TIE),                   # 182/28 = 6.5
    (2, {EL: 24}, Verdict.PREFER_SOL2),           # 168/28 = 6.0
    (3, {EL: 15, GR: 30}, Verdict.TIE),           # 195/30 = 6.5
)

_TIE_SLOTS = (0, 20, 40)
_INCOMPATIBLE_SLOTS = (7, 15, 23, 33, 41)


def _sample_base(region: int, rng: np.random.Generator, drops: dict[int, int]) -> np.ndarray:
    """Integer measure vector inside the requested rule region, leaving
    room so sol2 = base - drops stays within bounds and in-region."""
    base = rng.integers(0, 101, size=6).astype(float)
    if region == 1:
        base[CV] = rng.integers(0, 83)
    elif region == 2:
        base[CV] = rng.integers(83, 93)
    else:
        base[CV] = rng.integers(93, 101)
    for k, drop in drops.items():
        if k == CV:
            base[CV] = 100.0  # only used by the rule-3 template: 100 -> 93
        else:
            base[k] = float(rng.integers(drop, 101))
    return base


def _polygon(rng: np.random.Generator) -> str:
    # Cosmetic building outline for the UI; the core never reads it.
    w, h = int(rng.integers(18, 40)), int(rng.integers(14, 36))
    nx, ny = int(rng.integers(4, w - 2)), int(rng.integers(4, h - 2))
    points = f"4,4 {4 + w},4 {4 + w},{4 + ny} {4 + nx},{4 + ny} {4 + nx},{4 + h} 4,{4 + h}"
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 48 48">'
        f'<polygon points="{points}" fill="#8a8f98" stroke="#30343b"/></svg>'
    )


def _build_set(
    prefix: str,
    seed: int,
    incompatible_templates,
) -> ComparisonSet:
    schema = building_schema()
    fn = building_function()
    rng = np.random.default_rng(seed)
    incompatible = dict(zip(_INCOMPATIBLE_SLOTS, incompatible_templates))

    comparisons = []
    preferences = {}
    for slot in range(50):
        iid = f"{prefix}{slot:02d}"
        cid = f"{iid}:a:b"
        if slot in incompatible:
            region, drops, verdict = incompatible[slot]
            base = _sample_base(region, rng, drops)
            second = base.copy()
            for k, drop in drops.items():
                second[k] = base[k] - drop
        elif slot in _TIE_SLOTS:
            base = rng.integers(0, 101, size=6).astype(float)
            second = base.copy()
            verdict = Verdict.TIE
        else:
            # Compatible filler: perturb a few measures until the score
            # margin clears 1.0, then prefer the higher-scored side.
            base = rng.integers(0, 101, size=6).astype(float)
            while True:
                second = base.copy()
                for k in rng.choice(6, size=int(rng.integers(1, 4)), replace=False):
                    second[k] = float(rng.integers(0, 101))
                s1 = Solution(id="t1", instance_id=iid, measures=tuple(base))
                s2 = Solution(id="t2", instance_id=iid, measures=tuple(second))
                gap = evaluate(fn, s1) - evaluate(fn, s2)
                if abs(gap) >= 1.0:
                    break
            verdict = Verdict.PREFER_SOL1 if gap > 0 else Verdict.PREFER_SOL2
        sol1 = Solution(
            id=f"{iid}:a", instance_id=iid, measures=tuple(base), display=_polygon(rng)
        )
        sol2 = Solution(
            id=f"{iid}:b", instance_id=iid, measures=tuple(second), display=_polygon(rng)
        )
        comparisons.append(Comparison(id=cid, sol1=sol1, sol2=sol2))
        preferences[cid] = Preference(comparison_id=cid, verdict=verdict)

    return ComparisonSet(schema=schema, comparisons=tuple(comparisons), preferences=preferences)


def build_learning_set() -> ComparisonSet:
    return _build_set("bldg-L", seed=20240501, incompatible_templates=_LEARNING_INCOMPATIBLE)


def build_test_set() -> ComparisonSet:
    return _build_set("bldg-T", seed=20240502, incompatible_templates=_TEST_INCOMPATIBLE)


def main():
    from pathlib import Path

    from .. import persist

    out = Path(__file__).parent / "data"
    out.mkdir(exist_ok=True)
    persist.save_function(building_function(), out / "building_function.json")
    persist.save_comparison_set(build_learning_set(), out / "building_learning_set.json")
    persist.save_comparison_set(build_test_set(), out / "building_test_set.json")
    print(f"fixture files written to {out}")


if __name__ == "__main__":
    main()
