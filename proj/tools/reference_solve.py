#!/usr/bin/env python3
"""Solves an exported MPS model with HiGHS and writes `name value` lines.

Used to produce committed reference solutions; not needed at runtime.
"""
import argparse
import sys

import highspy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("mps")
    ap.add_argument("solution", help="output file, one `name value` pair per line")
    ap.add_argument("--method", default="ipm", choices=["simplex", "ipm"])
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", args.method)
    h.setOptionValue("run_crossover", "on")
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("dual_feasibility_tolerance", 1e-9)
    if h.readModel(args.mps) != highspy.HighsStatus.kOk:
        sys.exit(f"cannot read {args.mps}")
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        sys.exit(f"HiGHS status: {h.modelStatusToString(status)}")

    lp = h.getLp()
    x = h.getSolution().col_value
    with open(args.solution, "w") as f:
        f.write(f"# objective {h.getInfo().objective_function_value!r}\n")
        for name, v in zip(lp.col_names_, x):
            if v != 0.0:
                f.write(f"{name} {v!r}\n")
    print(repr(h.getInfo().objective_function_value))


if __name__ == "__main__":
    main()
