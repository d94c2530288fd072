import os
import json
import sys

import pandas as pd

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, BASE_DIR)

from ltlcompose.errors import PlannerError  # noqa: E402
from ltlcompose.gridworld import load_map  # noqa: E402
from ltlcompose.ltl import parse_ltl  # noqa: E402
from ltlcompose.mvpolicy import check_trace  # noqa: E402
from ltlcompose.pipeline import Pipeline  # noqa: E402

MAPS_DIR = os.path.join(BASE_DIR, "maps")
MANIFEST = os.path.join(MAPS_DIR, "scenarios.json")
OUTPUT_DIR = os.path.join(BASE_DIR, "output")

STAGES = ["abstract", "prune", "realize", "compile", "product", "plan", "ground", "execute"]


def run_scenario(scenario, maps_dir=MAPS_DIR):
    """One table row: plan, verdict, unsafe symbols and per-stage milliseconds."""
    grid = load_map(os.path.join(maps_dir, scenario["map"]))
    pipeline = Pipeline(grid)
    plan, trace = pipeline.run(scenario["ltl"], scenario.get("cycles", 1))

    row = {
        "scenario": scenario.get("name", scenario["ltl"]),
        "map": scenario["map"],
        "formula": scenario["ltl"],
        "status": "ok",
        "plan": " > ".join(list(plan.prefix) + [f"({c})" for c in plan.cycle]),
        "satisfied": check_trace(trace, parse_ltl(scenario["ltl"])),
        "unsafe": trace.unsafe_count,
        "forced": trace.forced,
        "unforced": trace.unforced,
    }
    for stage in STAGES:
        row[f"{stage}_ms"] = round(pipeline.timings.get(stage, 0.0), 3)
    return row


def failed_row(scenario, error):
    row = {
        "scenario": scenario.get("name", scenario.get("ltl", "")),
        "map": scenario.get("map", ""),
        "formula": scenario.get("ltl", ""),
        "status": type(error).__name__,
        "plan": "",
        "satisfied": False,
        "unsafe": None,
        "forced": None,
        "unforced": None,
    }
    for stage in STAGES:
        row[f"{stage}_ms"] = None
    return row


def main(manifest=MANIFEST, output_dir=OUTPUT_DIR, maps_dir=MAPS_DIR):
    if not os.path.exists(manifest):
        print(f"⚠️ Manifest not found: {manifest}")
        return None

    with open(manifest, "r", encoding="utf-8") as f:
        scenarios = json.load(f)

    print(f"📂 Running {len(scenarios)} scenarios from {manifest}")

    rows = []
    for scenario in scenarios:
        try:
            rows.append(run_scenario(scenario, maps_dir))
        except PlannerError as e:
            print(f"❌ Error running {scenario.get('name', scenario.get('ltl'))}: {e}")
            rows.append(failed_row(scenario, e))
            continue

    if not rows:
        print("❌ No scenarios were run!")
        return None

    os.makedirs(output_dir, exist_ok=True)
    df = pd.DataFrame(rows)
    output_file = os.path.join(output_dir, "runs.csv")
    df.to_csv(output_file, index=False)

    ok = df[df["status"] == "ok"]
    print(f"✅ Batch complete: {len(ok)}/{len(df)} scenarios planned")
    print(f"📊 Satisfied: {int(ok['satisfied'].sum())}, unsafe symbols: {int(ok['unsafe'].sum())}")
    print(f"📄 Table saved in {output_file}")
    return df


if __name__ == "__main__":
    main()
