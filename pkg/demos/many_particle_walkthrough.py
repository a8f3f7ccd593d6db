"""From the Dunkl Laplacian to an inverse-square particle system.

Three steps on A_2 (three particles on a line):
  1. conjugating Delta_k by w_k^(1/2) gives Laplacian minus pair potentials,
  2. the cross term left over by that conjugation vanishes identically,
  3. on functions that live inside one chamber, the Dunkl Hardy inequality turns
     into a Hardy inequality with pair interactions.

    python demos/many_particle_walkthrough.py
"""
from fractions import Fraction

import numpy as np

from dunklhardy.fields import gaussian
from dunklhardy.many_particle import (
    a_type_constants, chamber_bumps, conjugation_residual, cross_term_identity, many_particle_check_a,
)
from dunklhardy.roots import make_context

k = 0.4
ctx = make_context("A", 2, k)
rng = np.random.default_rng(3)

x = rng.standard_normal((200, 3))
x = x[np.min(np.abs(x @ ctx.system.positive_roots.T), axis=1) > 0.15]
res = conjugation_residual(ctx, gaussian([0.3, -0.1, 0.2]), x)
print(f"conjugation residual on {len(x)} points: max {np.max(res):.2e}")

exact = make_context("A", 2, Fraction(2, 5))
print("cross term at (1, 5/2, -3):", cross_term_identity(exact, [1, Fraction(5, 2), -3]))

f, support = chamber_bumps(ctx.system, rng, count=2)
rep = many_particle_check_a(3, k, f, support, n=24)
c = a_type_constants(3, k)
print(f"pair coefficient 2(k - k^2) = {c['pair']:.4f}, radial constant = {c['radial']:.4f}")
print(f"int |grad f|^2 = {rep.gradient_term.value:.6f}   interaction = {rep.interaction_term.value:.6f}   "
      f"radial = {rep.radial_constant:g} x {rep.radial_term.value:.6f}   margin = {rep.margin:.6f}")
