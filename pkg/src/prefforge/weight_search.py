"""Genetic search for the integer weight assignment minimising global error.

A genome is one block of weights per regression rule.  Fitness is the
(negated) global error; since rule conditions are fixed for the duration
of one search, per-solution rule membership is precompiled and each genome
is scored with a handful of vectorized array operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import GaConfig, LearnConfig
from .errors import InvalidInputError
from .model import ComparisonSet, Verdict
from .objective import (
    GlobalError,
    ObjectiveFunction,
    RegressionRule,
    RuleCondition,
    global_error,
)

__all__ = ["CompiledSample", "WeightSearchResult", "search_weights", "grid_search_1rule"]

_VERDICT_CODE = {Verdict.TIE: 0, Verdict.PREFER_SOL1: 1, Verdict.PREFER_SOL2: 2}


class CompiledSample:
    """Comparison data flattened into arrays for fast repeated scoring.

    Rule membership depends only on the (fixed) conditions, so it is
    resolved once; scoring a genome then costs a few numpy operations.
    Agreement with :func:`prefforge.objective.global_error` is covered by
    a dedicated equivalence test.
    """

    def __init__(self, conditions: list[RuleCondition], cset: ComparisonSet, config: LearnConfig):
        if not cset.comparisons:
            raise InvalidInputError("cannot search weights over an empty comparison set")
        if not conditions or not conditions[-1].is_catch_all:
            raise InvalidInputError("conditions must end with a catch-all")
        schema = cset.schema
        n = len(cset.comparisons)
        self.conditions = list(conditions)
        self.schema = schema
        self.val_error = config.val_error
        self.tie_epsilon = config.tie_epsilon
        self.x1 = np.empty((n, len(schema)))
        self.x2 = np.empty((n, len(schema)))
        self.verdict = np.empty(n, dtype=np.int64)
        for i, c in enumerate(cset.comparisons):
            pref = cset.preferences.get(c.id)
            if pref is None:
                raise InvalidInputError(f"comparison {c.id!r} has no recorded preference")
            self.x1[i] = c.sol1.measures
            self.x2[i] = c.sol2.measures
            self.verdict[i] = _VERDICT_CODE[pref.verdict]
        self.r1 = self._first_match(self.x1)
        self.r2 = self._first_match(self.x2)

    def _first_match(self, x: np.ndarray) -> np.ndarray:
        idx = np.full(len(x), len(self.conditions) - 1, dtype=np.int64)
        unresolved = np.ones(len(x), dtype=bool)
        for k, cond in enumerate(self.conditions[:-1]):
            match = unresolved.copy()
            for cl in cond.clauses:
                col = x[:, self.schema.index_of(cl.measure_id)]
                if cl.relation == "<":
                    match &= col < cl.threshold
                elif cl.relation == "<=":
                    match &= col <= cl.threshold
                elif cl.relation == ">":
                    match &= col > cl.threshold
                else:
                    match &= col >= cl.threshold
            idx[match] = k
            unresolved &= ~match
        return idx

    def score(self, weights: np.ndarray) -> GlobalError:
        """Mean error and incompatible count for one (n_rules, n_measures) genome."""
        w1 = weights[self.r1].astype(float)
        w2 = weights[self.r2].astype(float)
        f1 = (w1 * self.x1).sum(axis=1) / w1.sum(axis=1)
        f2 = (w2 * self.x2).sum(axis=1) / w2.sum(axis=1)
        diff = f1 - f2
        eps = self.tie_epsilon
        ok = np.where(
            self.verdict == 0,
            np.abs(diff) <= eps,
            np.where(self.verdict == 1, diff > eps, -diff > eps),
        )
        errors = np.where(ok, 0.0, self.val_error + np.abs(diff))
        return GlobalError(float(errors.sum() / len(errors)), int((~ok).sum()))


@dataclass(frozen=True)
class WeightSearchResult:
    function: ObjectiveFunction
    global_error: float
    incompatible: int
    trace: tuple[float, ...]  # best error per generation


def _decode(conditions: list[RuleCondition], weights: np.ndarray, schema) -> ObjectiveFunction:
    rules = tuple(
        RegressionRule(condition=cond, weights=tuple(int(w) for w in weights[k]))
        for k, cond in enumerate(conditions)
    )
    return ObjectiveFunction(schema=schema, rules=rules)


def _repair(genome: np.ndarray, rng: np.random.Generator, ga: GaConfig) -> None:
    # Every rule block must keep a positive weight (denominator > 0).
    for k in range(genome.shape[0]):
        if genome[k].sum() == 0:
            genome[k, rng.integers(genome.shape[1])] = max(1, ga.weight_min)


def search_weights(
    conditions: list[RuleCondition],
    cset: ComparisonSet,
    config: LearnConfig,
    seed_genomes: list[np.ndarray] | None = None,
) -> WeightSearchResult:
    """Run the GA and return the best decoded function.

    The all-ones genome is always injected into the initial population, so
    the achieved error never exceeds the all-ones error.  Extra
    ``seed_genomes`` (e.g. the pre-partition optimum) are injected too.
    Deterministic under ``config.seed``.
    """
    sample = CompiledSample(conditions, cset, config)
    ga = config.ga
    n_rules, n_meas = len(conditions), len(cset.schema)
    rng = np.random.default_rng(config.seed)

    population = [np.ones((n_rules, n_meas), dtype=np.int64)]
    for g in seed_genomes or []:
        if g.shape != (n_rules, n_meas):
            raise InvalidInputError(f"seed genome shape {g.shape} != {(n_rules, n_meas)}")
        population.append(g.astype(np.int64).copy())
    while len(population) < ga.population_size:
        genome = rng.integers(ga.weight_min, ga.weight_max + 1, size=(n_rules, n_meas))
        _repair(genome, rng, ga)
        population.append(genome)
    population = population[: ga.population_size]

    def score_all(pop):
        return [sample.score(g) for g in pop]

    scores = score_all(population)
    best_idx = min(range(len(population)), key=lambda i: scores[i].error)
    best_genome = population[best_idx].copy()
    best_score = scores[best_idx]
    trace = [best_score.error]

    def tournament() -> np.ndarray:
        picks = rng.integers(len(population), size=ga.tournament_size)
        winner = min(picks, key=lambda i: (scores[i].error, i))
        return population[winner]

    for _ in range(ga.generations):
        if ga.early_stop and best_score.error == 0.0:
            break
        elite_order = sorted(range(len(population)), key=lambda i: (scores[i].error, i))
        next_pop = [population[i].copy() for i in elite_order[: ga.elitism_count]]
        while len(next_pop) < ga.population_size:
            p1, p2 = tournament(), tournament()
            if rng.random() < ga.crossover_rate:
                mask = rng.random(size=p1.shape) < 0.5
                child = np.where(mask, p1, p2)
            else:
                child = p1.copy()
            mut = rng.random(size=child.shape) < ga.mutation_rate
            if mut.any():
                child = child.copy()
                child[mut] = rng.integers(ga.weight_min, ga.weight_max + 1, size=int(mut.sum()))
            _repair(child, rng, ga)
            next_pop.append(child)
        population = next_pop
        scores = score_all(population)
        gen_best = min(range(len(population)), key=lambda i: (scores[i].error, i))
        if scores[gen_best].error < best_score.error:
            best_score = scores[gen_best]
            best_genome = population[gen_best].copy()
        trace.append(best_score.error)

    fn = _decode(list(conditions), best_genome, cset.schema)
    # Report the canonical recomputation so downstream comparisons (learner
    # accept/backtrack, acceptance checks) all share one error source.
    canonical = global_error(fn, cset, config)
    return WeightSearchResult(
        function=fn,
        global_error=canonical.error,
        incompatible=canonical.incompatible,
        trace=tuple(trace),
    )


def grid_search_1rule(cset: ComparisonSet, config: LearnConfig) -> tuple[ObjectiveFunction, float]:
    """Exhaustive single-rule optimum over the integer weight grid.

    Only practical for one or two measures; used as the oracle the GA is
    checked against.  The all-zero genome is skipped (undefined mean).
    """
    n_meas = len(cset.schema)
    ga = config.ga
    if n_meas > 2:
        raise InvalidInputError("grid search is supported for at most 2 measures")
    best_fn, best_err = None, float("inf")
    span = range(ga.weight_min, ga.weight_max + 1)
    grids = [(w,) for w in span] if n_meas == 1 else [(a, b) for a in span for b in span]
    for weights in grids:
        if sum(weights) == 0:
            continue
        fn = ObjectiveFunction(
            schema=cset.schema,
            rules=(RegressionRule(condition=RuleCondition(), weights=weights),),
        )
        err = global_error(fn, cset, config).error
        if err < best_err:
            best_fn, best_err = fn, err
    return best_fn, best_err
