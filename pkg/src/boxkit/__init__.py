"""Exact box-type operations on finite product probability spaces.

The classical box, the measure-aware 11-box, the lenient st-box,
cylindrical cores and inflated sets, BKR-type inequality checks, and a
continuum-percolation Monte Carlo module.
"""
from .boxes import BoxWitness, classical_box, core, cylinder_set, find_witness
from .measure import (
    CondProbTable,
    ThresholdPair,
    cond_prob,
    cond_prob_table,
    eleven_box,
    ess_inf,
    inflate,
    st_box,
    st_box_complementary,
    functional_bound_sides,
    threshold_set,
)
from .space import (
    MAX_OUTCOMES,
    Alphabet,
    CapacityError,
    CylinderPattern,
    Event,
    ProductSpace,
    RealFunction,
    SpaceMismatchError,
    as_mask,
    mask_members,
    parse_rational,
)

__version__ = "0.1.0"
