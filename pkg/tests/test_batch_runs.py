import os

from scripts.batch_runs import main, run_scenario

from .conftest import MAPS_DIR


def test_batch_over_the_bundled_scenarios(tmp_path, capsys):
    df = main(manifest=os.path.join(MAPS_DIR, "scenarios.json"), output_dir=str(tmp_path),
              maps_dir=MAPS_DIR)
    assert len(df) == 8
    assert os.path.exists(tmp_path / "runs.csv")

    by_name = df.set_index("scenario")
    assert by_name.loc["contradiction", "status"] == "InfeasibleSpecError"
    ok = df[df["status"] == "ok"]
    assert len(ok) == 7
    assert ok["satisfied"].all()
    for name in ["blue square", "blue square, explicit", "blue, never square",
                 "blue non-square then purple"]:
        assert by_name.loc[name, "unsafe"] == 0
    assert by_name.loc["blue square", "plan"] == "b&square"
    assert "Batch complete: 7/8" in capsys.readouterr().out


def test_missing_manifest(tmp_path, capsys):
    assert main(manifest=str(tmp_path / "none.json"), output_dir=str(tmp_path)) is None
    assert "Manifest not found" in capsys.readouterr().out


def test_single_scenario_records_stage_timings():
    row = run_scenario({"map": "shelf.json", "ltl": "F square"}, MAPS_DIR)
    assert row["scenario"] == "F square"
    assert row["status"] == "ok"
    assert all(row[f"{stage}_ms"] >= 0 for stage in ["abstract", "prune", "plan", "execute"])
