from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from conftest import finite_systems
from joinlab.core import (
    cycle_system,
    identity_factor,
    identity_system,
    is_ergodic_system,
    make_factor_map,
    make_finite_system,
    one_point_system,
    product_system,
    trivial_factor,
)
from joinlab.errors import BruteForceCapExceeded, FactorMismatch, InvalidCoupling, JoinlabError
from joinlab.joinings import (
    Coupling,
    commutant,
    graph_joining,
    is_disjoint,
    joining_metric,
    product_joining,
    self_joining_from_commutant,
)
from joinlab.relative import (
    FactorPair,
    TripleCoupling,
    classify_self_joinings,
    common_factors,
    enumerate_factors,
    invariant_partitions,
    nondisjointness_witness,
    rel_indep_joining,
    relative_product,
)
from oracles import brute_invariant_partitions

H = F(1, 2)
C2, C3, C4 = cycle_system(2), cycle_system(3), cycle_system(4)


def parity_pair():
    parity = make_factor_map(C4, C2, lambda x: x % 2)
    return FactorPair(parity, parity)


def blocks_of(mapping):
    out = {}
    for x, z in enumerate(mapping):
        out.setdefault(z, set()).add(x)
    return frozenset(frozenset(b) for b in out.values())


# -- relative products ----------------------------------------------------------

def test_relative_product_over_a_point():
    t, s = C2, make_finite_system([1, 0, 2], [F(1, 4), F(1, 4), F(1, 2)])
    triple = relative_product(graph_joining(trivial_factor(t)), graph_joining(trivial_factor(s)))
    for x in range(2):
        for y in range(3):
            assert triple.weights[x][y][0] == t.measure[x] * s.measure[y]


def test_relative_product_of_diagonals():
    mu = [F(1, 6), F(1, 6), F(1, 3), F(1, 3)]
    t = make_finite_system([1, 0, 3, 2], mu)
    diag = graph_joining(identity_factor(t))
    triple = relative_product(diag, diag)
    for x in range(4):
        for y in range(4):
            for z in range(4):
                assert triple.weights[x][y][z] == (mu[x] if x == y == z else 0)


def test_relative_product_identity_and_shift():
    delta_id = Coupling(C2, C2, ((H, 0), (0, H)))
    delta_t = Coupling(C2, C2, ((0, H), (H, 0)))
    triple = relative_product(delta_id, delta_t)
    support = {(x, y, z) for x in range(2) for y in range(2) for z in range(2) if triple.weights[x][y][z]}
    assert support == {(z, C2.perm[z], z) for z in range(2)}
    assert all(triple.weights[x][y][z] == H for x, y, z in support)


def test_relative_product_mismatch():
    with pytest.raises(FactorMismatch):
        relative_product(product_joining(C2, C2), product_joining(C2, C3))


def test_triple_coupling_validates():
    with pytest.raises(InvalidCoupling):
        TripleCoupling((C2, C2, C2), (((H, 0), (0, 0)), ((0, 0), (H, 0))))


@settings(max_examples=40, deadline=None)
@given(finite_systems(max_size=4), finite_systems(max_size=4))
def test_relative_product_marginals(t, s):
    for pair in common_factors(t, s)[:8]:
        lam_t, lam_s = graph_joining(pair.left), graph_joining(pair.right)
        triple = relative_product(lam_t, lam_s)
        assert triple.marginal((0, 2)) == lam_t.weights
        assert triple.marginal((1, 2)) == lam_s.weights


# -- relatively independent joinings ------------------------------------------

def test_rel_indep_over_identity_and_point():
    t = make_finite_system([1, 0, 2], [F(1, 4), F(1, 4), F(1, 2)])
    assert rel_indep_joining(FactorPair(identity_factor(t), identity_factor(t))) == \
        graph_joining(identity_factor(t))
    assert rel_indep_joining(FactorPair(trivial_factor(t), trivial_factor(C3))) == \
        product_joining(t, C3)


def test_rel_indep_over_parity():
    lam = rel_indep_joining(parity_pair())
    e = F(1, 8)
    expected = tuple(tuple(e if (x - y) % 2 == 0 else 0 for y in range(4)) for x in range(4))
    assert lam.weights == expected


def test_factor_pair_needs_same_target():
    with pytest.raises(FactorMismatch):
        FactorPair(identity_factor(C2), identity_factor(C3))


def test_nondisjointness_witness():
    assert nondisjointness_witness(parity_pair()) == rel_indep_joining(parity_pair())
    assert nondisjointness_witness(FactorPair(trivial_factor(C4), trivial_factor(C4))) is None
    assert nondisjointness_witness(FactorPair(identity_factor(C3), identity_factor(C3))) == \
        graph_joining(identity_factor(C3))


@settings(max_examples=40, deadline=None)
@given(finite_systems(max_size=4), finite_systems(max_size=4))
def test_rel_indep_properties(t, s):
    for pair in common_factors(t, s)[:8]:
        lam = rel_indep_joining(pair)
        for x in range(t.size):
            for y in range(s.size):
                if lam[x, y]:
                    assert pair.left.mapping[x] == pair.right.mapping[y]
        witness = nondisjointness_witness(pair)
        if pair.is_trivial():
            assert lam == product_joining(t, s) and witness is None
        else:
            assert witness is not None
            assert joining_metric(witness, product_joining(t, s)) > 0
            assert not is_disjoint(t, s)


# -- factors ------------------------------------------------------------------

def test_enumerate_factors_examples():
    point = enumerate_factors(one_point_system())
    assert len(point) == 1 and point[0].target == one_point_system()

    targets = [f.target for f in enumerate_factors(C3)]
    assert targets == [C3, one_point_system()]

    four = enumerate_factors(C4)
    assert [f.target for f in four] == [C4, C2, one_point_system()]
    assert four[1].mapping == (0, 1, 0, 1)


def test_factor_cap():
    with pytest.raises(BruteForceCapExceeded):
        enumerate_factors(cycle_system(13))
    with pytest.raises(BruteForceCapExceeded):
        enumerate_factors(cycle_system(6), cap=5)


@given(finite_systems(max_size=6))
def test_invariant_partitions_against_brute_force(t):
    got = {blocks_of(labels) for labels in invariant_partitions(t)}
    assert got == set(brute_invariant_partitions(t.perm))
    assert len(got) == len(invariant_partitions(t))


@settings(max_examples=30, deadline=None)
@given(finite_systems(max_size=5))
def test_factor_lattice_closed_under_composition(t):
    factors = enumerate_factors(t)
    partitions = {blocks_of(f.mapping) for f in factors}
    assert blocks_of(identity_factor(t).mapping) in partitions
    assert blocks_of(trivial_factor(t).mapping) in partitions
    for f in factors:
        for g in enumerate_factors(f.target):
            assert blocks_of(f.then(g).mapping) in partitions


def test_common_factors_examples():
    pairs = common_factors(C2, C3)
    assert len(pairs) == 1 and pairs[0].is_trivial()

    pairs = common_factors(C4, C4)
    assert sorted({p.target.size for p in pairs}) == [1, 2, 4]
    # one pair per isomorphism between the two quotients: 1 + 2 + 4
    assert len(pairs) == 7

    tt = product_system(C2, C2)
    assert any(p.target == C2 and p.left == identity_factor(C2)
               for p in common_factors(C2, tt))


@settings(max_examples=30, deadline=None)
@given(finite_systems(max_size=4), finite_systems(max_size=4))
def test_common_factors_always_has_trivial_pair(t, s):
    pairs = common_factors(t, s)
    assert pairs[0].is_trivial()
    assert pairs == common_factors(t, s)


# -- self-joining classification ----------------------------------------------

def test_classify_three_cycle():
    report = classify_self_joinings(C3)
    assert len(report.vertices) == 3
    assert sorted(lab.power for lab in report.labels) == [0, 1, 2]
    assert not report.has_other


def test_classify_four_cycle():
    # J(T,T) for the uniform 4-cycle is a simplex on the four Δ_{T^n}; the
    # parity joining is their midpoint (Δ_Id + Δ_{T²})/2, not a vertex.
    report = classify_self_joinings(C4)
    assert sorted(lab.power for lab in report.labels) == [0, 1, 2, 3]
    assert report.count("power") == 4 and not report.has_other
    parity = rel_indep_joining(parity_pair())
    assert parity not in report.vertices
    mid = [[(a + b) / 2 for a, b in zip(r1, r2)] for r1, r2 in zip(
        self_joining_from_commutant(C4, C4.power(0)).weights,
        self_joining_from_commutant(C4, C4.power(2)).weights)]
    assert parity.weights == tuple(tuple(r) for r in mid)


def test_classify_point():
    report = classify_self_joinings(one_point_system())
    assert len(report.vertices) == 1 and str(report.labels[0]) == "Δ_Id"


def test_classify_needs_ergodic():
    with pytest.raises(JoinlabError):
        classify_self_joinings(identity_system(2))


@given(finite_systems(max_size=6))
def test_commutant_graphs_are_classified_vertices(t):
    if not is_ergodic_system(t):
        return
    report = classify_self_joinings(t)
    for s in commutant(t):
        assert self_joining_from_commutant(t, s) in report.vertices
