"""Exact Bondareva-Shapley analysis of TU games.

Finite games (with or without restricted cooperation) are decided by exact
rational LPs with certificates; countable-player games on the
finite-cofinite field are studied through truncations, certificate nets and
window-bounded probes.
"""

from .charges import (
    FinCofCharge,
    FiniteCharge,
    MonotoneSequence,
    continuity_probe,
    evaluate,
    functional,
    is_sigma_additive,
    separating_dirac,
)
from .core import (
    Balanced,
    EmptinessCertificate,
    FiniteGame,
    Unbalanced,
    UnboundedViolation,
    Variant,
    WeightSystem,
    balancedness_lp,
    check_balanced,
    check_core_membership,
    drop_grand_weight,
    egyenloseg_transform,
    find_core_element,
)
from .infinite import (
    AdditiveGame,
    CoSingletonGame,
    TableGame,
    pl2_certificate,
    pl2_net,
    sigma_core_probe,
    truncate,
    truncation_study,
    verify_certificate_net,
)
from .lp import RationalLP, solve, verify
from .setalgebra import (
    COUNTABLE,
    CoFin,
    Coalition,
    CoalitionSystem,
    FieldOfSets,
    Fin,
    PlayerUniverse,
    SimpleFunction,
    canonicalize,
    field_hull,
    sup_norm,
)

__version__ = "0.1.0"
