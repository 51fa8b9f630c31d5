#!/usr/bin/env python3
"""Write the three reference surface fixtures used by the stf-eval command.

  genus2.json    compact genus-2 surface, empty length spectrum
  hecke5.json    genus 0, one cusp, cone orders {2, 5} with an enumerated
                 spectrum, the order-5 cone flagged as degenerating
  twocone.json   genus 1 with cone orders {3, 4} and a small synthetic
                 spectrum
"""

import argparse
from pathlib import Path

from conetrace.geometry import SurfaceSignature
from conetrace.hecke import HeckeGroup, enumerate_length_spectrum
from conetrace.surface import LengthSpectrum, SurfaceData, surface_to_json


def build_fixtures(word_len: int, trace_bound: float) -> dict[str, SurfaceData]:
    return {
        "genus2": SurfaceData(SurfaceSignature(2, 0, ()), LengthSpectrum(())),
        "hecke5": SurfaceData(
            SurfaceSignature(0, 1, (2, 5)),
            enumerate_length_spectrum(HeckeGroup(5), word_len, trace_bound),
            degenerating_orders=(5,)),
        "twocone": SurfaceData(
            SurfaceSignature(1, 0, (3, 4)),
            LengthSpectrum(((2.0, 2), (2.5, 2), (3.1, 4)), 3.5)),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="fixtures", help="output directory")
    ap.add_argument("--word-len", type=int, default=12)
    ap.add_argument("--trace-bound", type=float, default=300.0)
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, surface in build_fixtures(args.word_len, args.trace_bound).items():
        path = outdir / f"{name}.json"
        path.write_text(surface_to_json(surface))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
