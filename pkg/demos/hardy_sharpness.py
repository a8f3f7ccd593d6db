"""Watch the L^2 Hardy quotient fall towards (N + 2 gamma - 2)^2 / 4.

The family is a truncated power r^(-(N+2g-2)/2) with logarithmic cut-offs. Its
exact quotient is printed next to a quadrature value, and next to the closed
form that is often quoted for it (which uses 1/(N+2g) where the integrals give
1/(N+2g-2)).

    python demos/hardy_sharpness.py
"""
from dunklhardy.inequalities import hardy_constant, hardy_sharpness_sequence
from dunklhardy.roots import make_context

for ctx in (make_context("Z2", 3, 0), make_context("A", 2, 0.5)):
    lam = hardy_constant(ctx)
    print(f"\n{ctx.descriptor}   N + 2 gamma = {ctx.homogeneous_dim:g}   constant = {lam:g}")
    print(f"{'n':>4} {'exact':>12} {'quadrature':>12} {'quoted form':>12}")
    for pt in hardy_sharpness_sequence(ctx, 50):
        if pt.n in (1, 2, 5, 10, 20, 50):
            print(f"{pt.n:>4} {pt.ratio:12.6f} {pt.ratio_quadrature:12.6f} {pt.closed_form_displayed:12.6f}")
