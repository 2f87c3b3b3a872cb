"""Seeded inequality suites with excess multiples.

Each suite draws random product spaces (fair, random rational and
zero-atom weights) and checks one family of bounds exactly.  A failure
would raise with a shrunk instance; none is expected.
"""
from statistics import median

from boxkit.verify import SUITES, run_suite

for suite in SUITES:
    results = run_suite(suite, range(120))
    reports = [r for res in results for r in res.reports]
    ratios = [float(r.excess_multiple) for r in reports if r.excess_multiple is not None]
    print(f"{suite:>6}: {len(reports):5d} checks, all hold: {all(r.holds for r in reports)}, "
          f"median excess {median(ratios):.3f}, min {min(ratios):.3f}")
