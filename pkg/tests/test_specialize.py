import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from repnu.exact_arith import (
    NuPolynomial,
    ResourceLimitError,
    binomial_poly,
    falling_factorial,
    poly_eval,
)
from repnu.diagrams import (
    DeltaMorphism,
    HMorphism,
    compose_delta,
    compose_delta_pair,
    compose_h,
    enumerate_diagrams,
    generator,
    identity_diagram,
    parse_diagram,
)
from repnu.specialize import (
    InjectionBasis,
    RationalMatrix,
    categorical_dimension,
    oracle_check_composition,
    specialize_delta,
    specialize_diagram,
    specialize_h,
    specialize_via_generators,
    validate_avoidance_rule,
)

D = parse_diagram


def test_injection_basis():
    b = InjectionBasis(2, 3)
    assert len(b) == 6
    assert b.elements[0] == (1, 2)
    assert b.elements == sorted(b.elements)
    assert len(InjectionBasis(3, 2)) == 0
    assert len(InjectionBasis(0, 4)) == 1
    with pytest.raises(ResourceLimitError):
        InjectionBasis(8, 12)


def test_matrix_basics():
    m = RationalMatrix(2, 2, [(0, 0, 1), (0, 1, 2), (1, 1, 3)])
    n = RationalMatrix(2, 2, [(0, 0, 1), (1, 0, 1)])
    p = m @ n
    assert p.get(0, 0) == 3 and p.get(1, 0) == 3
    assert (m - m).is_zero()
    assert m.trace() == 4
    k = m.kron(RationalMatrix.identity(2))
    assert k.get(0, 0) == 1 and k.get(1, 1) == 1 and k.get(0, 2) == 2


def test_identity_specializes_to_identity():
    for k, n in [(0, 3), (1, 4), (2, 4)]:
        m = specialize_diagram(identity_diagram(k), n)
        assert m == RationalMatrix.identity(len(InjectionBasis(k, n)))


def test_split_strand_matrix():
    # the one-strand split diagram becomes all-ones minus identity
    x = D("[1,1] {1} {1'}")
    m = specialize_diagram(x, 4)
    for i in range(4):
        for j in range(4):
            assert m.get(i, j) == (0 if i == j else 1)


def test_worked_example_functorial():
    pi = DeltaMorphism.from_diagram(D("[5,5] {1,1'} {2,3'} {4,2'} {3} {4'} {5} {5'}"))
    rho = DeltaMorphism.from_diagram(D("[5,4] {1,3'} {2,1'} {2'} {3,4'} {4} {5}"))
    for n in (6, 7):
        assert oracle_check_composition(rho, pi, "delta", n)


def test_h_worked_example_functorial():
    pi = HMorphism.from_diagram(D("[3,2] {1,1',2} {2',3}"))
    rho = HMorphism.from_diagram(D("[2,2] {1,2} {1'} {2'}"))
    assert oracle_check_composition(rho, pi, "h", 3)


@st.composite
def _bar_pair(draw, max_arity=3):
    r = draw(st.integers(0, max_arity))
    s = draw(st.integers(0, max_arity))
    t = draw(st.integers(0, max_arity))
    before = draw(st.sampled_from(enumerate_diagrams(r, s, bar_only=True)))
    after = draw(st.sampled_from(enumerate_diagrams(s, t, bar_only=True)))
    return after, before


@settings(max_examples=60, deadline=None)
@given(_bar_pair(), st.integers(4, 6))
def test_delta_rule_functorial(pair, n):
    after, before = pair
    assert oracle_check_composition(
        DeltaMorphism.from_diagram(after), DeltaMorphism.from_diagram(before), "delta", n
    )


@st.composite
def _any_pair(draw, max_arity=2):
    r = draw(st.integers(0, max_arity))
    s = draw(st.integers(0, max_arity))
    t = draw(st.integers(0, max_arity))
    before = draw(st.sampled_from(enumerate_diagrams(r, s)))
    after = draw(st.sampled_from(enumerate_diagrams(s, t)))
    return after, before


@settings(max_examples=40, deadline=None)
@given(_any_pair(), st.integers(2, 4))
def test_h_rule_functorial(pair, n):
    after, before = pair
    assert oracle_check_composition(
        HMorphism.from_diagram(after), HMorphism.from_diagram(before), "h", n
    )


def test_generator_route_matches_direct():
    validate_avoidance_rule(random.Random(0))


def test_generator_chain_expansion_matches_composition():
    # the generator factorization, composed symbolically, recovers the
    # diagram plus one merge term per partial matching, coefficient 1
    from repnu.specialize import _generator_chain, _merge_pairs
    from repnu.diagrams import _partial_matchings

    d = D("[3,3] {1,2'} {2} {3} {1'} {3'}")
    chain = _generator_chain(d)
    acc = DeltaMorphism.identity(d.r)
    for g in chain:
        acc = compose_delta(DeltaMorphism.from_diagram(g), acc)
    expected = {}
    for pairs in _partial_matchings(d.solitary_tops(), d.solitary_bottoms()):
        expected[_merge_pairs(d, pairs)] = NuPolynomial([1])
    assert acc.terms == expected


def test_categorical_dimension_identity():
    for k in range(4):
        assert categorical_dimension(DeltaMorphism.identity(k)) == falling_factorial(k)


def test_categorical_dimension_symmetrizer():
    swap = DeltaMorphism.from_diagram(generator("perm", 2, (2, 1)))
    sym = Fraction(1, 2) * (DeltaMorphism.identity(2) + swap)
    assert categorical_dimension(sym) == binomial_poly(2)
    alt = Fraction(1, 2) * (DeltaMorphism.identity(2) - swap)
    assert categorical_dimension(alt) == binomial_poly(2)


def test_specialized_identities_from_calculus():
    # (v - k) id at v = n, via matrices
    k, n = 2, 5
    rst = specialize_diagram(generator("res_star", k, 2), n)
    res = specialize_diagram(generator("res", k, 2), n)
    prod = res @ rst
    assert prod == (n - k) * RationalMatrix.identity(len(InjectionBasis(k, n)))
