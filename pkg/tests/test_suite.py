import pytest

from core.exceptions import InputError

FAST_ITEMS = [
    "adjoint_calculus",
    "compatible_projectors",
    "douglas",
    "sequence_adjointability",
    "divergence",
    "krein_extension",
    "sections",
    "wold",
]


def test_items_are_in_canonical_order(suite):
    assert list(suite.items) == [
        "adjoint_calculus",
        "compatible_projectors",
        "douglas",
        "sequence_adjointability",
        "divergence",
        "krein_extension",
        "geodesic_invariants",
        "race",
        "sections",
        "wold",
    ]


def test_reduced_suite_passes(suite):
    report = suite.run(seed=5, scale=0.02, only=FAST_ITEMS)
    failed = {item.name: item.metrics for item in report.items if not item.passed}
    assert report.success, failed
    assert [item.name for item in report.items] == FAST_ITEMS


def test_wold_item_reports_a_shrinking_band(suite):
    report = suite.run(seed=2, scale=0.02, only=["wold"])
    metrics = report.items[0].metrics
    assert report.success, metrics
    assert metrics["dyadic_reflections_band"] == [4, 3]
    assert metrics["double_shift_band"] == [0, 0]


def test_krein_item_counts_completions(suite):
    report = suite.run(seed=3, scale=0.05, only=["krein_extension"])
    metrics = report.items[0].metrics
    assert report.success, metrics
    assert metrics["completions"] <= metrics["fallbacks"]
    assert metrics["failures"] == 0


def test_curve_items_pass_at_minimal_scale(suite):
    report = suite.run(seed=5, scale=0.01, only=["geodesic_invariants", "race"])
    assert report.success, [item.metrics for item in report.items]
    race = report.items[1]
    assert race.metrics["violations"] == 0


def test_reports_are_reproducible(suite):
    first = suite.run(seed=9, scale=0.01, only=["douglas", "krein_extension"])
    second = suite.run(seed=9, scale=0.01, only=["douglas", "krein_extension"])
    assert first.model_dump_json() == second.model_dump_json()


def test_item_streams_do_not_depend_on_selection(suite):
    alone = suite.run(seed=4, scale=0.01, only=["sections"])
    together = suite.run(seed=4, scale=0.01, only=["douglas", "sections"])
    assert alone.items[0].metrics == together.items[1].metrics


def test_bad_arguments(suite):
    with pytest.raises(InputError):
        suite.run(only=["nonexistent"])
    with pytest.raises(InputError):
        suite.run(scale=0.0)
