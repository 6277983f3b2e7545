"""
Checking the spectrum by finite differences
===========================================

Deform the profile by ``t sin(l v)`` and shift it by ``tau(t)`` so that the
conformal class does not change. The second derivative of the energy at
``t = 0`` is then the quadratic form of the stability operator on that
mode, which we compare with the closed form.
"""

import math

from clifford_stability.oracle import VariationSpec, db_fd, lambda_from_quotient, second_variation_fd, verify_mode
from clifford_stability.spectrum import lagrange_multiplier
from clifford_stability.torus import make_torus

for r, l in [(1 / math.sqrt(2), 2), (0.6, 2), (0.4, 2), (0.3, 3)]:
    rep = second_variation_fd(VariationSpec(make_torus(r), "sin", l))
    print(
        f"r={r:.4f} l={l}: measured {rep.measured:+.8f}  form {rep.predicted:+.8f}"
        f"  2 pi^2 r s E {rep.predicted_closed_form:+.8f}  ratio {rep.measured / rep.predicted_closed_form:.6f}"
    )

# The measurement is exactly half of 2 pi^2 r s E: the factored eigenvalue
# E carries a factor 2 relative to the quadratic form lw - lambda lb.

# Derivative of the conformal class along the normal: decides between the
# two candidate constants.
print(db_fd(make_torus(0.5)).to_dict())

# Lagrange multiplier from |W|^2 / (2 DB(W)).
T = make_torus(0.35)
print("lambda:", lambda_from_quotient(T), "closed form:", lagrange_multiplier(T))

# Both directions, sign check and tolerance in one call.
out = verify_mode(make_torus(0.3), 2)
print("r=0.3, l=2 passed:", out.passed, "negative:", out.expected_negative)
