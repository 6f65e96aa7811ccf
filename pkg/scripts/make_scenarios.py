#!/usr/bin/env python3
"""Regenerate the checked-in scenario and inventory JSON files from fixtures."""
import json
from pathlib import Path

from cranor.fixtures import baseline_scenario_dict, demo_inventory_dict, demo_scenario_dict

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "scenarios"


def main():
    OUT.mkdir(exist_ok=True)
    targets = {
        "demo.json": demo_scenario_dict(),
        "baseline.json": baseline_scenario_dict(),
        "inventory.json": demo_inventory_dict(),
    }
    for name, doc in targets.items():
        path = OUT / name
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
