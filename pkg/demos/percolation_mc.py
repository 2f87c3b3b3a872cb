"""Crossings in a random geometric graph on the unit square.

Points within 2r (sup norm) are joined.  A is a left-right crossing, B a
bottom-top one, and the witness event asks for both from disjoint point
sets.  As n grows all three frequencies approach one.  With annihilation
(q > 0), fixing the points of a witness keeps its crossing with high
probability, and the bound on the failure rate is checked at the end.
"""
import math

from boxkit.percolation import (NORMS, conditional_mc, find_disjoint_witness, mc_experiment,
                                sample_config)

r = 0.12
print(f"{'n':>4} {'p_A':>7} {'p_B':>7} {'p_AB':>7} {'witness':>8}")
for n in (30, 60, 90, 120):
    s = mc_experiment(n, r, 0.0, replicates=1000, seed=n)
    print(f"{n:>4} {s.p_A.value:7.3f} {s.p_B.value:7.3f} {s.p_AB.value:7.3f} {s.witness.value:8.3f}")

n = 40
tau = NORMS["linf"]
q = math.sqrt(0.4 / (n * n * tau))
for seed in range(200):
    cfg = sample_config(n, r, q, seed=seed)
    w = find_disjoint_witness(cfg, seed=seed)
    if w is not None:
        break
k = len(w.K)
est = conditional_mc(cfg, sorted(w.K), "LR", replicates=5000, seed=1)
lo, hi = est.interval
print(f"\nn={n}, q={q:.5f}, |K|={k}: P(A | X_K) ~ {est.value:.4f} [{lo:.4f}, {hi:.4f}],"
      f" bound {1 - (n - k) * k * tau * q * q:.4f}")
