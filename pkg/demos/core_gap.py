"""Cylindrical core of a 13-edge ladder event.

A is a left-right crossing, or all edges closed, or exactly three edges
open.  Only the cylinders inside A matter for boxes against proper sets,
so the core can be much smaller than A.  Here it is slightly larger than
the crossing event: three open edges of one row plus the free fourth edge
form a cylinder inside A.
"""
from fractions import Fraction

import numpy as np

from boxkit import classical_box, core, Event
from boxkit.scenarios import grid13
from boxkit.verify import oracle_core

g = grid13()
A, cross = g.A, g.events["crossing"]
a0 = core(A)
gap = A.prob() - a0.prob()
print("P(A) =", A.prob(), " P(core A) =", a0.prob(), " P(crossing) =", cross.prob())
print(f"gap = {gap} = {float(gap):.5f} (the value claimed for this example: "
      f"{g.notes['claimed_gap']} = {float(Fraction(g.notes['claimed_gap'])):.5f})")
print("union-of-cylinders oracle agrees:", a0 == oracle_core(A))

extra = a0 - cross
print(f"core minus crossing: {len(extra)} configurations, e.g.",
      g.space.label(extra.outcomes()[0]))

rng = np.random.default_rng(0)
B = Event(g.space, rng.random(g.space.outcome_count) < 0.5)
print("A box B == core(A) box B for a random proper B:",
      classical_box(A, B) == classical_box(a0, B))
