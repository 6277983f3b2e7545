"""
Transverse traceless corrections on the flat torus
==================================================

A tracefree perturbation ``alpha`` of the flat metric changes which tensors
are transverse traceless. The correction ``eta`` solves a first order
system with a Poisson equation behind it. For ``alpha = phi q^2`` with a
single Fourier mode ``phi`` the ``q^2`` component of the answer is
``-c_r(k, l) phi``; the ``q^1`` component ``u1`` vanishes only on the axes.
"""

import numpy as np

from clifford_stability.tensors import FourierField, SymTensorField, c_constant, tt_perturbation
from clifford_stability.torus import make_torus

T = make_torus(0.4)
q2 = SymTensorField.q2(T)

for k, l in [(1, 0), (0, 3), (2, 1), (3, 3)]:
    phi = FourierField.mode(T, k, l, "cos", "sin" if l else "cos")
    u1, u2 = tt_perturbation(q2 * phi).tt_coefficients()
    ratio = -u2.coef[np.abs(phi.coef) > 0.1] / phi.coef[np.abs(phi.coef) > 0.1]
    print(f"({k},{l})  c = {c_constant(T, k, l):+.6f}  solve gives {ratio.real.mean():+.6f}"
          f"  |u1| = {u1.max_abs_coef():.1e}")

# For a random tracefree perturbation the correction is still tracefree and
# orthogonal to both TT tensors.
rng = np.random.default_rng(3)
alpha = SymTensorField.tracefree(FourierField.random(T, 4, rng), FourierField.random(T, 4, rng))
eta = tt_perturbation(alpha)
print("tracefree:", eta.is_tracefree(), " <eta, q1> =", eta.inner(SymTensorField.q1(T)))
