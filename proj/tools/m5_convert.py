#!/usr/bin/env python3
"""Convert M5 sales plus precomputed quantile forecasts into realworld JSONL.

Field mapping (one output line per series id):

    id        <- sales CSV column "id" (e.g. FOODS_3_090_CA_3_evaluation)
    history   <- the --history day columns d_{origin-history+1} .. d_{origin}
    actuals   <- d_{origin+1} .. d_{origin+horizon} when present in the sales CSV, else null
    quantiles <- forecast CSV rows for that id, one column per level ("0.1" .. "0.9"),
                 ordered by the "step" column (1 .. horizon)

The sales CSV is the wide M5 layout (id, item_id, ..., d_1 .. d_N). The
forecast CSV is long: id, step, then one column per quantile level. Levels
without all nine deciles still render but are left out of the sCRPS
statistics.
"""

import argparse
import csv
import json
import sys
from collections import defaultdict


def read_forecasts(path):
    by_id = defaultdict(dict)
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        levels = [c for c in reader.fieldnames if c not in ("id", "step")]
        for key in levels:
            float(key)
        for row in reader:
            by_id[row["id"]][int(row["step"])] = {k: float(row[k]) for k in levels}
    return levels, by_id


def convert(sales_path, forecast_path, origin, history, horizon, out):
    levels, forecasts = read_forecasts(forecast_path)
    written = 0
    with open(sales_path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            sid = row["id"]
            if sid not in forecasts:
                continue
            steps = forecasts[sid]
            if sorted(steps) != list(range(1, horizon + 1)):
                raise SystemExit(f"{sid}: forecast steps must be 1..{horizon}")
            hist = [float(row[f"d_{d}"]) for d in range(origin - history + 1, origin + 1)]
            future_cols = [f"d_{d}" for d in range(origin + 1, origin + horizon + 1)]
            actuals = [float(row[c]) for c in future_cols] if all(row.get(c) not in (None, "") for c in future_cols) else None
            quantiles = {k: [steps[s][k] for s in range(1, horizon + 1)] for k in levels}
            out.write(json.dumps({"id": sid, "history": hist, "quantiles": quantiles, "actuals": actuals}) + "\n")
            written += 1
    return written


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--sales", required=True, help="M5 sales CSV (wide d_1..d_N layout)")
    p.add_argument("--forecasts", required=True, help="long CSV: id, step, <level columns>")
    p.add_argument("--origin", type=int, required=True, help="index of the last history day (d_<origin>)")
    p.add_argument("--history", type=int, default=120)
    p.add_argument("--horizon", type=int, default=28)
    p.add_argument("--out", default="-")
    args = p.parse_args()
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        n = convert(args.sales, args.forecasts, args.origin, args.history, args.horizon, out)
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"wrote {n} cases", file=sys.stderr)


if __name__ == "__main__":
    main()
