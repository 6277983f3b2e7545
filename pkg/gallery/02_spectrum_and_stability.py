"""
Spectrum, Morse index and the stability band
============================================

The stability operator of a Clifford torus is diagonal in the Fourier modes
``(k, l)``. Only the axis modes ``(0, l)`` and ``(k, 0)`` can go negative,
so the Morse index counts ``l >= 2`` with ``l r < 1`` plus ``k >= 2`` with
``k s < 1``.
"""

import math
from pathlib import Path

import numpy as np

from clifford_stability.cli import _sweep_rows, stability_svg
from clifford_stability.spectrum import morse_index, spectrum_table, thresholds
from clifford_stability.torus import make_torus

# Eigenvalues at the minimal torus. (1,0), (0,1) and (1,1) are the zero
# modes coming from the symmetries of S^3.
for e in spectrum_table(make_torus(1 / math.sqrt(2)), 2, 2):
    print(f"({e.mode.k},{e.mode.l})  E={e.e:9.4f}  form={e.hessian:9.4f}  {e.sign}")

# Unstable example: two negative directions at r = 0.3.
rep = morse_index(make_torus(0.3))
print("r = 0.3: index", rep.morse_index, "witnesses", rep.witnesses())

# Where modes change sign.
for t in thresholds(4):
    print(f"{t.family}={t.index}: r = {t.r_root:.15f}")

# Sweep and write the stability diagram next to this script.
rows = _sweep_rows(np.linspace(0.05, 0.95, 901), workers=2)
stable = [row["r"] for row in rows if row["stable"]]
print(f"stable for r in [{min(stable):.4f}, {max(stable):.4f}]")
out = Path(__file__).with_name("stability.svg")
out.write_text(stability_svg(rows))
print("wrote", out)
