"""Tunable parameters for weight search, partitioning, and the learn loop."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError


@dataclass(frozen=True)
class GaConfig:
    """Genetic-algorithm knobs for the integer weight search.

    Defaults are sized so a 3-rule x 6-measure problem converges in seconds.
    """

    population_size: int = 60
    generations: int = 300
    mutation_rate: float = 0.1
    crossover_rate: float = 0.9
    elitism_count: int = 2
    tournament_size: int = 3
    weight_min: int = 0
    weight_max: int = 10
    early_stop: bool = True

    def __post_init__(self):
        if self.population_size < 2:
            raise InvalidInputError("population_size must be >= 2")
        if self.generations < 1:
            raise InvalidInputError("generations must be >= 1")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise InvalidInputError("mutation_rate must be in [0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise InvalidInputError("crossover_rate must be in [0, 1]")
        if self.elitism_count < 0 or self.elitism_count >= self.population_size:
            raise InvalidInputError("elitism_count must be in [0, population_size)")
        if self.tournament_size < 2:
            raise InvalidInputError("tournament_size must be >= 2")
        if not 0 <= self.weight_min < self.weight_max:
            raise InvalidInputError("need 0 <= weight_min < weight_max")


@dataclass(frozen=True)
class PartitionConfig:
    """Knobs for the rule-induction partitioner."""

    min_rule_coverage: int = 5
    max_clauses_per_rule: int = 2
    max_rules: int = 4
    prune_holdout_fraction: float = 1.0 / 3.0

    def __post_init__(self):
        if self.min_rule_coverage < 1:
            raise InvalidInputError("min_rule_coverage must be >= 1")
        if self.max_clauses_per_rule < 1:
            raise InvalidInputError("max_clauses_per_rule must be >= 1")
        if self.max_rules < 0:
            raise InvalidInputError("max_rules must be >= 0")
        if not 0.0 < self.prune_holdout_fraction < 1.0:
            raise InvalidInputError("prune_holdout_fraction must be in (0, 1)")


@dataclass(frozen=True)
class LearnConfig:
    """Everything the learner needs: error model, GA, partitioner, seed.

    ``val_error`` is the fixed penalty added to every incompatible
    comparison's error; it dominates the value margin, so minimising the
    global error first minimises the number of incompatibilities.
    ``tie_epsilon`` makes TIE verdicts satisfiable on real-valued scores;
    at 0 the compatibility test demands exact equality.
    """

    val_error: float = 40.0
    tie_epsilon: float = 0.5
    ga: GaConfig = field(default_factory=GaConfig)
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    max_refinements: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.val_error < 0:
            raise InvalidInputError("val_error must be >= 0")
        if self.tie_epsilon < 0:
            raise InvalidInputError("tie_epsilon must be >= 0")
        if self.max_refinements < 0:
            raise InvalidInputError("max_refinements must be >= 0")
