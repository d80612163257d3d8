#!/usr/bin/env python3
"""Write SVG pictures of the inversion, cubic and quartic leaf models."""
import argparse
from pathlib import Path

from nexpansive.svg import family_figure, inversion_figure, render

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", default="out/figures")
args = ap.parse_args()
out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
(out / "inversion.svg").write_text(render(inversion_figure()))
for kind in ("cubic", "quartic"):
    (out / f"{kind}.svg").write_text(render(family_figure(kind)))
print("wrote", ", ".join(sorted(p.name for p in out.glob("*.svg"))))
