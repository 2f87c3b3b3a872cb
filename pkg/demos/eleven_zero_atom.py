"""Null sets change the 11-box.

Two coordinates on {0, 1, 2}, where symbol 2 has weight zero.  With
A = B = {x0 != x1} the classical box is empty, yet the outcome (2, 2)
lies in the 11-box even though it is in neither event: revealing x0 = 2
makes x0 != x1 hold for every completion that carries positive weight.
"""
from boxkit import classical_box, eleven_box, ess_inf, RealFunction
from boxkit.scenarios import zeroatom

z = zeroatom()
print("classical box:", classical_box(z.A, z.B).outcomes())
eleven = eleven_box(z.A, z.B)
print("11-box:       ", eleven.outcomes(), " P =", eleven.prob())
print("inside A & B? ", eleven <= (z.A & z.B))

f = RealFunction.indicator(z.A)
print("ess inf of 1_A over [x]_{0} at x = (2, 2):", ess_inf(f, (2, 2), {0}))
