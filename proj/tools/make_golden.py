#!/usr/bin/env python3
"""Solves an exported MPS model with HiGHS and writes the golden values used by the tests.

The cost breakdown is rebuilt from the model's objective coefficients, grouped by
variable name prefix, so nothing here depends on the embedded solver.
"""
import argparse
import json
import re
import sys

import highspy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("mps")
    ap.add_argument("golden", help="output JSON file")
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", "ipm")
    h.setOptionValue("run_crossover", "on")
    h.setOptionValue("primal_feasibility_tolerance", 1e-10)
    h.setOptionValue("dual_feasibility_tolerance", 1e-10)
    if h.readModel(args.mps) != highspy.HighsStatus.kOk:
        sys.exit(f"cannot read {args.mps}")
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        sys.exit(f"HiGHS status: {h.modelStatusToString(status)}")

    lp = h.getLp()
    x = h.getSolution().col_value
    costs = {"energy_usd": 0.0, "demand_usd": 0.0, "maintenance_usd": 0.0,
             "fleet_usd": 0.0, "station_usd": 0.0}
    group = {"q": "energy_usd", "pmax": "demand_usd", "x": "maintenance_usd",
             "F": "fleet_usd", "s": "station_usd"}
    plugs = {}
    peaks = {}
    fleet = 0.0
    for name, c, v in zip(lp.col_names_, lp.col_cost_, x):
        prefix = name.split("_")[0]
        if prefix in group:
            costs[group[prefix]] += c * v
        if m := re.fullmatch(r"s_(\d+)_r(\d+)", name):
            plugs[(int(m[1]), int(m[2]))] = v
        elif m := re.fullmatch(r"pmax_(\d+)", name):
            peaks[int(m[1])] = v
        elif name == "F":
            fleet = v
    n_loc = max(loc for loc, _ in plugs) + 1
    n_rate = max(r for _, r in plugs) + 1
    costs["total_usd"] = sum(costs.values())

    golden = {
        "objective": h.getInfo().objective_function_value,
        "costs": costs,
        "fleet": fleet,
        "plugs": [[plugs[(loc, r)] for r in range(n_rate)] for loc in range(n_loc)],
        "peak_kw": [peaks[loc] for loc in range(n_loc)],
    }
    with open(args.golden, "w") as f:
        json.dump(golden, f, indent=2)
        f.write("\n")
    print(repr(golden["objective"]))


if __name__ == "__main__":
    main()
