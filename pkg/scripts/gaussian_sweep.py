"""Gaussian key-rate regions over a symmetric eavesdropper-noise sweep.

Writes a CSV table, the hull vertices as JSON and an SVG of the nested hulls.
"""
import argparse
import json
from pathlib import Path

from skagree.cli import hulls_svg
from skagree.gaussian import GaussianParams, channel_terms, symmetric_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nc", type=float, nargs="+", default=[0.5, 0.6, 0.7, 0.8, 0.9])
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--out", default="out/gaussian")
    args = ap.parse_args()

    base = GaussianParams.fig2(args.nc[0])
    rep = symmetric_sweep(base, tuple(args.nc), args.steps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    print(f"{'Nc':>5} {'shape':>10} {'r1*':>8} {'sum*':>8} {'ch1':>8} {'ch_sum':>8}")
    for sp in rep.points:
        c1, _, cs = channel_terms(sp.params)
        print(f"{sp.params.Nc1:5.2f} {sp.shape:>10} {sp.best[0]:8.4f} {sp.best[2]:8.4f} {c1:8.4f} {cs:8.4f}")
    print(f"sum-term threshold x* = {rep.threshold:.6f}; nested = {rep.nested}")
    for d in rep.discrepancies:
        print(f"discrepancy {d['item']}: narrated {d['narrated']}, computed {d['computed']}")

    (out / "sweep.json").write_text(json.dumps({"threshold": rep.threshold, "nested": rep.nested,
                                                "discrepancies": rep.discrepancies,
                                                "rows": rep.rows()}, indent=2))
    (out / "sweep.svg").write_text(hulls_svg([(f"Nc={sp.params.Nc1:g}", sp.region.hull)
                                              for sp in rep.points]))
    print(f"wrote {out}/sweep.json and sweep.svg")


if __name__ == "__main__":
    main()
