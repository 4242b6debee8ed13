"""Versioned JSON documents for every artifact, with canonical byte output.

Every top-level document carries ``format_version`` (currently "1").
Serialization uses a fixed key order and sorted preference keys, so saving
the same value twice produces identical bytes.  Loading walks the document
with a JSON path cursor and reports the exact location of any problem.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import model
from .elicitation import Session, Strategy, StrategyKind, StrategyPipeline
from .errors import InvalidInputError, InvariantViolationError, ParseError, VersionMismatchError
from .learner import LearnIteration, LearnReport
from .model import (
    Comparison,
    ComparisonSet,
    Measure,
    MeasureSchema,
    Preference,
    ProblemInstance,
    Solution,
    Verdict,
)
from .objective import Clause, ObjectiveFunction, RegressionRule, RuleCondition

__all__ = [
    "FORMAT_VERSION",
    "dumps_document",
    "save_comparison_set",
    "load_comparison_set",
    "save_function",
    "load_function",
    "save_instances",
    "load_instances",
    "save_session",
    "load_session",
    "save_report",
    "load_report",
    "comparison_set_to_document",
    "comparison_set_from_document",
    "function_to_document",
    "function_from_document",
    "instances_to_document",
    "instances_from_document",
    "session_to_document",
    "session_from_document",
    "report_to_document",
    "report_from_document",
]

FORMAT_VERSION = "1"


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read file: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    return doc


def _check_version(doc: dict):
    version = doc.get("format_version")
    if version is None:
        raise VersionMismatchError("missing format_version", "$.format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION!r})",
            "$.format_version",
        )


def _get(obj: dict, key: str, kind, path: str, optional: bool = False, default=None):
    if not isinstance(obj, dict):
        raise InvariantViolationError("expected an object", path)
    if key not in obj:
        if optional:
            return default
        raise InvariantViolationError(f"missing field {key!r}", f"{path}.{key}")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None and not isinstance(value, kind):
        raise InvariantViolationError(
            f"field {key!r} must be {getattr(kind, '__name__', kind)}", f"{path}.{key}"
        )
    return value


# -- measure schema ------------------------------------------------------

def _schema_to_obj(schema: MeasureSchema) -> dict:
    return {
        "measures": [{"id": m.id, "label": m.label} for m in schema.measures],
        "val_min": schema.val_min,
        "val_max": schema.val_max,
    }


def _schema_from_obj(obj: dict, path: str) -> MeasureSchema:
    measures = _get(obj, "measures", list, path)
    parsed = []
    for i, m in enumerate(measures):
        mp = f"{path}.measures[{i}]"
        parsed.append(Measure(id=_get(m, "id", str, mp), label=_get(m, "label", str, mp, optional=True, default="")))
    val_min = _get(obj, "val_min", float, path)
    val_max = _get(obj, "val_max", float, path)
    try:
        return MeasureSchema(measures=tuple(parsed), val_min=val_min, val_max=val_max)
    except InvalidInputError as e:
        raise InvariantViolationError(str(e), path) from e


# -- solutions / instances ----------------------------------------------

def _solution_to_obj(sol: Solution) -> dict:
    obj = {
        "id": sol.id,
        "instance_id": sol.instance_id,
        "measures": list(sol.measures),
    }
    if sol.display is not None:
        obj["display"] = sol.display
    return obj


def _solution_from_obj(obj: dict, path: str) -> Solution:
    measures = _get(obj, "measures", list, path)
    for i, v in enumerate(measures):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InvariantViolationError("measure values must be numbers", f"{path}.measures[{i}]")
    return Solution(
        id=_get(obj, "id", str, path),
        instance_id=_get(obj, "instance_id", str, path),
        measures=tuple(float(v) for v in measures),
        display=_get(obj, "display", str, path, optional=True),
    )


def instances_to_document(instances: list[ProblemInstance], schema: MeasureSchema) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "schema": _schema_to_obj(schema),
        "instances": [
            {
                "id": inst.id,
                "description": inst.description,
                "solutions": [_solution_to_obj(s) for s in inst.solutions],
            }
            for inst in instances
        ],
    }


def instances_from_document(doc: dict) -> tuple[list[ProblemInstance], MeasureSchema]:
    _check_version(doc)
    schema = _schema_from_obj(_get(doc, "schema", dict, "$"), "$.schema")
    out = []
    for i, obj in enumerate(_get(doc, "instances", list, "$")):
        path = f"$.instances[{i}]"
        solutions = []
        iid = _get(obj, "id", str, path)
        for j, s in enumerate(_get(obj, "solutions", list, path)):
            sol = _solution_from_obj(s, f"{path}.solutions[{j}]")
            if sol.instance_id != iid:
                raise InvariantViolationError(
                    f"solution {sol.id!r} carries instance_id {sol.instance_id!r}, "
                    f"expected {iid!r}",
                    f"{path}.solutions[{j}].instance_id",
                )
            _check_bounds(sol, schema, f"{path}.solutions[{j}]")
            solutions.append(sol)
        out.append(
            ProblemInstance(
                id=iid,
                description=_get(obj, "description", str, path, optional=True, default=""),
                solutions=tuple(solutions),
            )
        )
    return out, schema


def _check_bounds(sol: Solution, schema: MeasureSchema, path: str):
    if len(sol.measures) != len(schema):
        raise InvariantViolationError(
            f"{len(sol.measures)} measure values for a {len(schema)}-measure schema",
            f"{path}.measures",
        )
    for k, v in enumerate(sol.measures):
        if not (schema.val_min <= v <= schema.val_max):
            raise InvariantViolationError(
                f"value {v} outside [{schema.val_min}, {schema.val_max}]",
                f"{path}.measures[{k}]",
            )


# -- comparison sets ------------------------------------------------------

def comparison_set_to_document(cset: ComparisonSet) -> dict:
    comparisons = []
    for c in cset.comparisons:
        obj = {"id": c.id, "sol1": _solution_to_obj(c.sol1), "sol2": _solution_to_obj(c.sol2)}
        if c.structure is not None:
            obj["structure"] = c.structure
        comparisons.append(obj)
    return {
        "format_version": FORMAT_VERSION,
        "schema": _schema_to_obj(cset.schema),
        "comparisons": comparisons,
        "preferences": {
            cid: cset.preferences[cid].verdict.value for cid in sorted(cset.preferences)
        },
    }


def comparison_set_from_document(doc: dict) -> ComparisonSet:
    _check_version(doc)
    schema = _schema_from_obj(_get(doc, "schema", dict, "$"), "$.schema")
    comparisons = []
    for i, obj in enumerate(_get(doc, "comparisons", list, "$")):
        path = f"$.comparisons[{i}]"
        sol1 = _solution_from_obj(_get(obj, "sol1", dict, path), f"{path}.sol1")
        sol2 = _solution_from_obj(_get(obj, "sol2", dict, path), f"{path}.sol2")
        _check_bounds(sol1, schema, f"{path}.sol1")
        _check_bounds(sol2, schema, f"{path}.sol2")
        comparisons.append(
            Comparison(
                id=_get(obj, "id", str, path),
                sol1=sol1,
                sol2=sol2,
                structure=_get(obj, "structure", str, path, optional=True),
            )
        )
    preferences = {}
    prefs_obj = _get(doc, "preferences", dict, "$", optional=True, default={})
    for cid, verdict in prefs_obj.items():
        path = f"$.preferences.{cid}"
        try:
            preferences[cid] = Preference(comparison_id=cid, verdict=Verdict(verdict))
        except ValueError:
            raise InvariantViolationError(f"unknown verdict {verdict!r}", path) from None
    cset = ComparisonSet(schema=schema, comparisons=tuple(comparisons), preferences=preferences)
    problems = model.validate(cset)
    if problems:
        raise InvariantViolationError("; ".join(problems), "$")
    return cset


# -- objective functions ---------------------------------------------------

def function_to_document(fn: ObjectiveFunction) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "schema": _schema_to_obj(fn.schema),
        "rules": [
            {
                "condition": [
                    {"measure": cl.measure_id, "op": cl.relation, "threshold": cl.threshold}
                    for cl in rule.condition.clauses
                ],
                "weights": list(rule.weights),
            }
            for rule in fn.rules
        ],
    }


def function_from_document(doc: dict) -> ObjectiveFunction:
    _check_version(doc)
    schema = _schema_from_obj(_get(doc, "schema", dict, "$"), "$.schema")
    rules = []
    for i, obj in enumerate(_get(doc, "rules", list, "$")):
        path = f"$.rules[{i}]"
        clauses = []
        for j, cl in enumerate(_get(obj, "condition", list, path)):
            cp = f"{path}.condition[{j}]"
            try:
                clauses.append(
                    Clause(
                        measure_id=_get(cl, "measure", str, cp),
                        relation=_get(cl, "op", str, cp),
                        threshold=_get(cl, "threshold", float, cp),
                    )
                )
            except InvalidInputError as e:
                raise InvariantViolationError(str(e), cp) from e
        weights = _get(obj, "weights", list, path)
        try:
            rules.append(
                RegressionRule(condition=RuleCondition(tuple(clauses)), weights=tuple(weights))
            )
        except (InvalidInputError, TypeError, ValueError) as e:
            raise InvariantViolationError(str(e), f"{path}.weights") from e
    try:
        return ObjectiveFunction(schema=schema, rules=tuple(rules))
    except InvalidInputError as e:
        raise InvariantViolationError(str(e), "$.rules") from e


# -- sessions ---------------------------------------------------------------

def session_to_document(session: Session) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "set": comparison_set_to_document(session.set),
        "pipeline": [
            {"kind": s.kind.value, "measures": list(s.measures), "budget": budget}
            for s, budget in session.pipeline.stages
        ],
        "max_questions": session.max_questions,
        "seed": session.seed,
        "measure_tolerance": session.measure_tolerance,
        "asked": list(session.asked),
        "asked_stages": list(session.asked_stages),
        "pending": session.pending,
        "pending_stage": session.pending_stage,
        "stage_index": session.stage_index,
        "stage_used": session.stage_used,
        "picks_made": session.picks_made,
        "log": list(session.log),
    }


def session_from_document(doc: dict) -> Session:
    _check_version(doc)
    cset = comparison_set_from_document(_get(doc, "set", dict, "$"))
    stages = []
    for i, obj in enumerate(_get(doc, "pipeline", list, "$")):
        path = f"$.pipeline[{i}]"
        kind = _get(obj, "kind", str, path)
        try:
            strategy = Strategy(
                kind=StrategyKind(kind),
                measures=tuple(_get(obj, "measures", list, path, optional=True, default=[])),
            )
        except (ValueError, InvalidInputError) as e:
            raise InvariantViolationError(str(e), path) from e
        stages.append((strategy, _get(obj, "budget", int, path)))
    try:
        pipeline = StrategyPipeline(tuple(stages))
    except InvalidInputError as e:
        raise InvariantViolationError(str(e), "$.pipeline") from e
    pending = doc.get("pending")
    pending_stage = doc.get("pending_stage")
    return Session(
        set=cset,
        pipeline=pipeline,
        max_questions=_get(doc, "max_questions", int, "$"),
        seed=_get(doc, "seed", int, "$"),
        measure_tolerance=_get(doc, "measure_tolerance", float, "$"),
        asked=tuple(_get(doc, "asked", list, "$", optional=True, default=[])),
        asked_stages=tuple(_get(doc, "asked_stages", list, "$", optional=True, default=[])),
        pending=pending,
        pending_stage=pending_stage,
        stage_index=_get(doc, "stage_index", int, "$", optional=True, default=0),
        stage_used=_get(doc, "stage_used", int, "$", optional=True, default=0),
        picks_made=_get(doc, "picks_made", int, "$", optional=True, default=0),
        log=tuple(_get(doc, "log", list, "$", optional=True, default=[])),
    )


# -- learn reports ----------------------------------------------------------

def report_to_document(report: LearnReport) -> dict:
    # wall_time_s is deliberately excluded: identical inputs must serialize
    # to identical bytes.
    return {
        "format_version": FORMAT_VERSION,
        "iterations": [
            {
                "rules": it.rules,
                "global_error": it.global_error,
                "incompatible": it.incompatible,
                "accepted": it.accepted,
            }
            for it in report.iterations
        ],
        "accepted_errors": list(report.accepted_errors),
        "final_error": report.final_error,
        "final_incompatible": report.final_incompatible,
        "consistency_flags": list(report.consistency_flags),
        "refinement_cap_hit": report.refinement_cap_hit,
    }


def report_from_document(doc: dict) -> LearnReport:
    _check_version(doc)
    iterations = []
    for i, obj in enumerate(_get(doc, "iterations", list, "$")):
        path = f"$.iterations[{i}]"
        iterations.append(
            LearnIteration(
                rules=_get(obj, "rules", int, path),
                global_error=_get(obj, "global_error", float, path),
                incompatible=_get(obj, "incompatible", int, path),
                accepted=_get(obj, "accepted", bool, path),
            )
        )
    return LearnReport(
        iterations=tuple(iterations),
        accepted_errors=tuple(_get(doc, "accepted_errors", list, "$")),
        final_error=_get(doc, "final_error", float, "$"),
        final_incompatible=_get(doc, "final_incompatible", int, "$"),
        consistency_flags=tuple(_get(doc, "consistency_flags", list, "$")),
        refinement_cap_hit=_get(doc, "refinement_cap_hit", bool, "$", optional=True, default=False),
    )


# -- file helpers -------------------------------------------------------------

def _save(doc: dict, path: str | Path):
    Path(path).write_text(dumps_document(doc), encoding="utf-8")


def save_comparison_set(cset: ComparisonSet, path: str | Path):
    _save(comparison_set_to_document(cset), path)


def load_comparison_set(path: str | Path) -> ComparisonSet:
    return comparison_set_from_document(_read_json(path))


def save_function(fn: ObjectiveFunction, path: str | Path):
    _save(function_to_document(fn), path)


def load_function(path: str | Path) -> ObjectiveFunction:
    return function_from_document(_read_json(path))


def save_instances(instances: list[ProblemInstance], schema: MeasureSchema, path: str | Path):
    _save(instances_to_document(instances, schema), path)


def load_instances(path: str | Path) -> tuple[list[ProblemInstance], MeasureSchema]:
    return instances_from_document(_read_json(path))


def save_session(session: Session, path: str | Path):
    _save(session_to_document(session), path)


def load_session(path: str | Path) -> Session:
    return session_from_document(_read_json(path))


def save_report(report: LearnReport, path: str | Path):
    _save(report_to_document(report), path)


def load_report(path: str | Path) -> LearnReport:
    return report_from_document(_read_json(path))
