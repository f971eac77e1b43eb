import json
from pathlib import Path

import pytest

import metrolabel

DATA = Path(__file__).resolve().parents[2] / "data"


def demo():
    return (DATA / "demo.json").read_text()


def test_validate_counts_lines_and_stops():
    assert metrolabel.validate(demo()) == (3, 20)


def test_schema_error_is_a_value_error():
    with pytest.raises(ValueError, match="/version"):
        metrolabel.validate('{"version": 2, "style": "curved", "lines": []}')


def test_dyn_matches_the_golden_svg():
    r = metrolabel.label(demo())
    assert r["success"]
    assert r["svg"] == (DATA / "demo.svg").read_text()
    assert len(r["sides"]) == 20
    assert set(r["sides"].values()) <= {"left", "right"}
    stats = json.loads(r["stats_json"])
    assert stats["success"] is True


def test_dyn_is_no_worse_than_greedy():
    dyn = metrolabel.label(demo(), algo="dyn")
    greedy = metrolabel.label(demo(), algo="greedy")
    assert dyn["cost"]["total"] <= greedy["cost"]["total"]


def test_bad_algorithm():
    with pytest.raises(ValueError):
        metrolabel.label(demo(), algo="fastest")


def test_oracle_budget():
    with pytest.raises(metrolabel.BudgetExceeded):
        metrolabel.label(demo(), algo="oracle", oracle_budget=10)


def test_hardgen_round_trips_through_validate():
    formula = json.dumps({"num_vars": 2, "clauses": [[1, 2, 2]]})
    assert metrolabel.satisfiable(formula)
    lines, stops = metrolabel.validate(metrolabel.hardgen(formula))
    assert lines == 1
    assert stops > 10
