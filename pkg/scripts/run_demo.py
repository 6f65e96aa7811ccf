#!/usr/bin/env python3
"""Run the cell scale-up experiment and print what happened, step by step.

The scenario deploys a 1.4 MHz LTE cell, ramps offered load until the 6-RB
grid saturates, and lets the overload alarm drive a stop-and-redeploy
reconfiguration to the 5 MHz blueprint. The printout follows the headline
quantities: RB capacity, the cpu/ram steps, the downtime window and the
spectrum footprint swap.
"""
import argparse
from pathlib import Path

from cranor.fixtures import demo_scenario_dict
from cranor.sim import Scenario, report_to_json, run_scenario


def collapse(trace):
    out = []
    for t, v in trace:
        if not out or out[-1][1] != v:
            out.append((t, v))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--report", type=Path, default=None, help="also write the full report JSON")
    args = parser.parse_args()

    report = run_scenario(Scenario.from_dict(demo_scenario_dict()))

    print("== events ==")
    for e in report["events"]:
        if e["kind"] in ("ns_state", "alarm_state", "decision", "carrier_assigned",
                         "carrier_released", "downtime"):
            desc = {k: v for k, v in e.items() if k not in ("seq", "kind", "t")}
            print(f"t={e['t']:>6.1f}  {e['kind']:<17} {desc}")

    print("\n== rb capacity steps ==")
    for t, v in collapse(report["traces"]["ns/cell-a/rb_capacity"]):
        print(f"t={t:>6.1f}  capacity={v:.0f} RB")

    print("\n== steady state after reconfiguration ==")
    for metric in ("cpu_pct", "ram_mb", "rb_occupied", "bler", "snr_db"):
        t, v = report["traces"][f"ns/cell-a/{metric}"][-1]
        print(f"{metric:<12} {v}")

    for w in report["downtime"]:
        print(f"\ndowntime: {w['length_s']}s (t={w['start']}..{w['end']})")

    if args.report:
        args.report.write_text(report_to_json(report))
        print(f"\nfull report: {args.report}")


if __name__ == "__main__":
    main()
