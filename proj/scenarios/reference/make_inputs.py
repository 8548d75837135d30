"""Writes the synthetic terrain, features and riverbed mask of the reference scenario.

The valley is invented: 6 km x 3 km at 20 m cells, draining east at 0.3 %, with a
200 m wide, 3 m deep main channel, two levees and a block of buildings on the
north bank. Run `swflood build-dsm` afterwards to extrude the features (see README).
"""
from pathlib import Path

import numpy as np

NCOLS, NROWS, CS = 300, 150, 20.0
YC = NROWS * CS / 2
here = Path(__file__).parent

x = (np.arange(NCOLS) + 0.5) * CS
y = (NROWS - np.arange(NROWS) - 0.5) * CS  # raster row 0 is north
X, Y = np.meshgrid(x, y)
d = np.abs(Y - YC)
dtm = 20.0 + 0.003 * (NCOLS * CS - X) + 0.004 * d
dtm = np.where(d < 100.0, dtm - 3.0, dtm)

with open(here / "dtm.asc", "w") as f:
    f.write(f"ncols {NCOLS}\nnrows {NROWS}\nxllcorner 0\nyllcorner 0\ncellsize {CS:g}\nNODATA_value -9999\n")
    np.savetxt(f, dtm, fmt="%.4f")


def ground(px, py):
    return 20.0 + 0.003 * (NCOLS * CS - px) + 0.004 * abs(py - YC)


lines = ["# class;KIND;x y z,... (class 6: levees, class 7: buildings, class 3: vegetation, not extruded)"]
for yl in (YC + 130.0, YC - 130.0):
    pts = [(px, yl, ground(px, yl) + 1.5) for px in (1000.0, 2500.0, 4000.0)]
    lines.append("6;LINE;" + ",".join(f"{a:g} {b:g} {c:.3f}" for a, b, c in pts))
for bx in range(2000, 3600, 200):
    for by in (YC + 300.0, YC + 500.0):
        z = ground(bx + 50, by + 50) + 8.0
        ring = [(bx, by), (bx + 100, by), (bx + 100, by + 100), (bx, by + 100), (bx, by)]
        lines.append("7;POLYGON;" + ",".join(f"{a:g} {b:g} {z:.3f}" for a, b in ring))
lines.append(f"3;POINT;1500 {YC - 600:g} {ground(1500, YC - 600) + 12:.3f}")
(here / "features.txt").write_text("\n".join(lines) + "\n")
(here / "classes.txt").write_text("# levees and buildings\n6\n7\n")

rows = [r for r in range(NROWS) if abs(y[r] - YC) < 100.0]
(here / "riverbed_mask.txt").write_text("# row col of the inflow cells on the west edge\n" +
                                        "".join(f"{r} 0\n" for r in rows))
