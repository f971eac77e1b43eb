"""Metro map labeling: candidate generation, per-line optimal labeling and the
greedy baseline, exposed over JSON documents."""

from ._core import (
    BudgetExceeded,
    MapGeometryError,
    SchemaError,
    hardgen,
    label,
    satisfiable,
    validate,
)

__all__ = [
    "BudgetExceeded",
    "MapGeometryError",
    "SchemaError",
    "hardgen",
    "label",
    "satisfiable",
    "validate",
]
