import os
import sys

import pytest

core_dir = os.environ.get("VCT_CORE_DIR")
if core_dir:
    sys.path.insert(0, core_dir)

_core = pytest.importorskip("_core")


def test_unit_conversions_round_trip():
    assert _core.mmol_to_mgdl(6.0) == pytest.approx(108.096)
    for y in (2.2, 6.0, 15.5):
        assert _core.mgdl_to_mmol(_core.mmol_to_mgdl(y)) == pytest.approx(y, rel=1e-12)


def test_meal_sizes_at_70_kg():
    expected = {"large": 90.3, "medium": 60.2, "small": 39.9, "snack": 20.3}
    for size, grams in expected.items():
        assert abs(_core.meal_grams(70.0, size) - grams) <= 0.5
    with pytest.raises(ValueError):
        _core.meal_grams(70.0, "feast")


def test_range_classification_boundaries():
    assert _core.classify(2.9) == 0
    assert _core.classify(3.0) == 1
    assert _core.classify(3.9) == 2
    assert _core.classify(10.0) == 2
    assert _core.classify(10.1) == 3
    assert _core.classify(14.0) == 4


def test_mean_participant_screens_clean():
    for model in ("hovorka", "uvapadova"):
        rule, basal = _core.screen(model, _core.mean_draws(model))
        assert rule == "none"
        assert basal >= 0.4


def test_protocol_totals():
    info = _core.build_protocol(75.0, 11)
    assert info["events"] == 1664
    assert info["meals"] == 1092
    assert info["snacks"] == 496
    assert info["exercise"] == 76


def test_generate_and_run(tmp_path):
    cohort = tmp_path / "cohort.tsv"
    counts = _core.generate_population(2, "hovorka", 5, str(cohort))
    assert counts["accepted"] == 2
    assert counts["attempts"] >= 2
    assert cohort.read_text().startswith("# vct-cohort v1")

    config = tmp_path / "trial.ini"
    config.write_text(
        "[trial]\n"
        f"cohort = {cohort}\n"
        "weeks = 0.5\n"
        "titration_weeks = 0\n"
        "master_seed = 9\n"
    )
    out = tmp_path / "run"
    res = _core.run_trial(str(config), workers=1, out=str(out))
    assert res["meta"]["simulated"] == 2
    assert res["meta"]["failures"] == []
    assert len(res["rows"]) == 2
    for row in res["rows"]:
        assert 2.0 < row["mean_mmol_per_l"] < 20.0
        assert 0.0 <= row["tir"] <= 1.0
    assert (out / "summary.csv").exists()
    assert (out / "report.json").exists()
    assert res["summary_csv"].startswith("# vct-summary v1")
