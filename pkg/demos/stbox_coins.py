"""Lenient boxes on coin tosses.

n = 2m + 1 fair tosses; A says the first m + 1 are heads, B that the last
m + 1 are tails.  A and B are disjoint, so the classical box is empty, but
the st-box at s = t = 1/2 is not.
"""
from fractions import Fraction

from boxkit import classical_box, inflate, st_box, st_box_complementary
from boxkit.scenarios import coin, threesided
from boxkit.verify import check_st_bounds

half = Fraction(1, 2)
print(f"{'m':>2} {'P(st box)':>10} {'size':>5} {'P(A_1/2)':>9} {'excess':>7}")
for m in range(1, 5):
    c = coin(m)
    box = st_box(c.A, c.B, (half, half))
    first, _ = check_st_bounds(c.A, c.B, (half, half))
    assert classical_box(c.A, c.B).is_empty()
    assert st_box_complementary(c.A, c.B, (half, half)) == box
    print(f"{m:>2} {str(box.prob()):>10} {len(box):>5} {str(inflate(c.A, half).prob()):>9} "
          f"{str(first.excess_multiple):>7}")

members = [coin(2).space.label(x) for x in st_box(coin(2).A, coin(2).B, (half, half)).outcomes()]
print("m = 2 members:", " ".join(members))

# forcing L = K^c loses outcomes in general
t = threesided()
third = Fraction(1, 3)
x = tuple("HTS".index(ch) for ch in "HHSTT")
print("HHSTT in st box:", x in st_box(t.A, t.B, (third, third)),
      "| with L = K^c:", x in st_box_complementary(t.A, t.B, (third, third)))
