"""Exact joinings of finite measure-preserving systems and Markov shifts."""

from .core import (
    FactorMap,
    FiniteSystem,
    MeasurableSet,
    cycle_system,
    identity_system,
    is_ergodic_system,
    make_factor_map,
    make_finite_system,
    one_point_system,
    product_system,
)
from .joinings import (
    Coupling,
    JoiningPolytope,
    commutant,
    detect_graph_structure,
    enumerate_vertices,
    ergodic_decomposition,
    find_isomorphism,
    graph_joining,
    is_disjoint,
    is_ergodic_joining,
    joining_metric,
    joining_polytope,
    product_joining,
    self_joining_from_commutant,
    validate_joining,
)
from .relative import (
    FactorPair,
    TripleCoupling,
    classify_self_joinings,
    common_factors,
    enumerate_factors,
    nondisjointness_witness,
    rel_indep_joining,
    relative_product,
)

__all__ = [
    "FactorMap",
    "FiniteSystem",
    "MeasurableSet",
    "cycle_system",
    "identity_system",
    "is_ergodic_system",
    "make_factor_map",
    "make_finite_system",
    "one_point_system",
    "product_system",
    "Coupling",
    "JoiningPolytope",
    "commutant",
    "detect_graph_structure",
    "enumerate_vertices",
    "ergodic_decomposition",
    "find_isomorphism",
    "graph_joining",
    "is_disjoint",
    "is_ergodic_joining",
    "joining_metric",
    "joining_polytope",
    "product_joining",
    "self_joining_from_commutant",
    "validate_joining",
    "FactorPair",
    "TripleCoupling",
    "classify_self_joinings",
    "common_factors",
    "enumerate_factors",
    "nondisjointness_witness",
    "rel_indep_joining",
    "relative_product",
]

__version__ = "0.1.0"
