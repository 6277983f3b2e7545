"""
The family of CMC Clifford tori
===============================

Each radius ``r`` in (0, 1) gives a torus ``r S^1 x s S^1`` in the unit
3-sphere, with ``s = sqrt(1 - r^2)``. Its mean curvature is constant, its
Willmore energy is ``pi^2 / (r s)`` and its conformal class is the
rectangle with side ratio ``b = s / r``.
"""

import numpy as np

from clifford_stability.torus import (
    constrained_residual,
    geometric_data,
    make_torus,
    willmore_energy_clifford,
)

# A few members of the family. The minimal one sits at r = 1/sqrt(2).
for r in (0.2, 0.5, 1 / np.sqrt(2), 0.8):
    T = make_torus(r)
    d = geometric_data(T)
    print(
        f"r={r:.4f}  s={T.s:.4f}  b={T.b:.4f}  H={d.h:+.4f}  "
        f"W={willmore_energy_clifford(T):.4f}  W-gradient={d.wgrad:+.4f}"
    )

# The energy is smallest for the minimal torus, where it equals 2 pi^2.
rs = np.linspace(0.01, 0.99, 9801)
energy = [willmore_energy_clifford(make_torus(r)) for r in rs]
print("argmin r =", rs[int(np.argmin(energy))], " min W / (2 pi^2) =", min(energy) / (2 * np.pi**2))

# None of these tori is a Willmore surface apart from r = 1/sqrt(2), but all
# of them are constrained Willmore: the gradient is a multiple of the
# pairing of the tracefree second fundamental form with a TT tensor.
rel = [
    constrained_residual(make_torus(r)) / abs(geometric_data(make_torus(r)).wgrad)
    for r in rs[::50]
    if abs(r - 1 / np.sqrt(2)) > 1e-3
]
print("max relative constrained residual:", max(rel))
