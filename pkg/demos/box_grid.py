"""Disjoint occurrence on a 7-edge ladder.

A joins the two top corners through open edges, B the two bottom corners.
The box A□B asks for both crossings using disjoint sets of edges.
"""
from boxkit import classical_box, find_witness, mask_members
from boxkit.scenarios import grid2x3
from boxkit.verify import check_bkr

g = grid2x3()
print("edges:", ", ".join(g.notes["edges"]))
print("P(A) =", g.A.prob(), " P(B) =", g.B.prob())

box = classical_box(g.A, g.B)
print("P(A box B) =", box.prob(), f"({len(box)} configurations)")

rep = check_bkr(g.A, g.B)
print(f"P(A)P(B) / P(A box B) = {rep.excess_multiple} = {float(rep.excess_multiple):.4f}")

# every box configuration has top and bottom rows fully open
w = find_witness(g.A, g.B, (1,) * 7)
print("witness for the all-open grid: K =", list(mask_members(w.K)), " L =", list(mask_members(w.L)))
