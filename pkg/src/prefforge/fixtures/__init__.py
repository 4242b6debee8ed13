"""Bundled building-generalisation fixture: schema, function, comparison sets.

The comparison sets are constructed (seeded, regenerable via
``python -m prefforge.fixtures.builder``) so that the bundled three-rule
function scores exactly 5 incompatible comparisons with global error 4.25
on the learning set and 5 with 4.63 on the test set.  Those numbers are
permanent regression targets.
"""

from importlib import resources
from pathlib import Path

from ..model import ComparisonSet
from ..objective import ObjectiveFunction
from .. import persist
from .builder import (
    building_function,
    building_schema,
    build_learning_set,
    build_test_set,
)

__all__ = [
    "building_schema",
    "building_function",
    "build_learning_set",
    "build_test_set",
    "data_path",
    "load_learning_set",
    "load_test_set",
    "load_function",
]

_DATA_FILES = {
    "function": "building_function.json",
    "learning": "building_learning_set.json",
    "test": "building_test_set.json",
}


def data_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file: function, learning, or test."""
    return Path(resources.files(__package__) / "data" / _DATA_FILES[name])


def load_function() -> ObjectiveFunction:
    return persist.load_function(data_path("function"))


def load_learning_set() -> ComparisonSet:
    return persist.load_comparison_set(data_path("learning"))


def load_test_set() -> ComparisonSet:
    return persist.load_comparison_set(data_path("test"))
