#!/usr/bin/env python3
"""Run the full desk-scale experiment battery and collect CSV artifacts.

Produces, under --outdir:

  parseval.csv       representation agreement across q in 3..12, t in {0.1,1,10}
  bound.csv          the truncation bound on the 54-point (q, delta, t, s) grid
  delta_limit.csv    decay of |I_{q,delta}(1)| along delta in {1,10,100,1000}
  sweep.csv          reduced trace of the triangle family, N in {3,...,48}, t = 1
  smalltime.csv      reduced trace of the N = 8 fixture at t in {1e-3,1e-2,1e-1}
  stf.csv            trace-formula geometric side vs standard trace (3 fixtures)

Each CSV has a .json sidecar with config and column notes.  Exits nonzero
if any check fails (worst exit code wins).
"""

import argparse
import sys
from pathlib import Path

from conetrace.cli import main as cli_main
from make_fixtures import build_fixtures
from conetrace.surface import surface_to_json


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--cache-dir", default="results/cache")
    ap.add_argument("--threads", type=int, default=2)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    fixdir = out / "fixtures"
    fixdir.mkdir(exist_ok=True)
    for name, surface in build_fixtures(12, 300.0).items():
        (fixdir / f"{name}.json").write_text(surface_to_json(surface))

    threads = str(args.threads)
    runs = [
        ["parseval-check", "--grid-q", "3,4,5,6,7,8,9,10,11,12",
         "--grid-t", "0.1,1,10", "--out", str(out / "parseval.csv"),
         "--threads", threads],
        ["bound-check", "--grid-q", "3,10,100", "--grid-delta", "0.5,1,2",
         "--grid-t", "0.5,1", "--grid-s", "0,1,5",
         "--out", str(out / "bound.csv"), "--threads", threads],
        ["bound-check", "--grid-q", "3,50", "--grid-delta", "1,10,100,1000",
         "--grid-t", "1", "--grid-s", "0",
         "--out", str(out / "delta_limit.csv"), "--threads", threads],
        ["degeneration-sweep", "--grid-n", "3,6,12,24,48", "--grid-t", "1",
         "--cache-dir", args.cache_dir,
         "--out", str(out / "sweep.csv"), "--threads", threads],
        ["degeneration-sweep", "--grid-n", "8", "--grid-t", "0.001,0.01,0.1",
         "--cache-dir", args.cache_dir,
         "--out", str(out / "smalltime.csv"), "--threads", threads],
    ]
    worst = 0
    for argv in runs:
        code = cli_main(argv)
        print(f"{argv[0]:20s} -> exit {code}")
        worst = max(worst, code)

    for name in ("genus2", "hecke5", "twocone"):
        code = cli_main(["stf-eval", "--fixture", str(fixdir / f"{name}.json"),
                         "--grid-t", "0.5,1,2",
                         "--out", str(out / f"stf_{name}.csv"),
                         "--threads", threads])
        print(f"stf-eval {name:12s} -> exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
