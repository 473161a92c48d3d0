import json
import random

import pytest
from hypothesis import given, strategies as st

from telescoped.exactalg import FgAbGroup
from telescoped.steinitz import INF, PrimeExponentSeq, type_of_multipliers, valuation
from telescoped.towers import (NONZERO, ZERO, AbTower, MultiplierSequence, PrimePowerTail,
                               lim, mittag_leffler, multiplication_tower)
from telescoped.torsionfree import (HomogeneousGroup, RankOneGroup, borel_class_key, dual_tower,
                                    ext_to_Z, from_multiplication_tower, group_from_json, hom_to_Z,
                                    star_equivalent, zpinv)

PRIMES = [2, 3, 5, 7, 11, 13]


@st.composite
def types(draw, allow_default=True):
    exc = {}
    for p in draw(st.lists(st.sampled_from(PRIMES), max_size=4, unique=True)):
        exc[p] = draw(st.one_of(st.integers(0, 4), st.just(INF)))
    default = draw(st.integers(0, 2)) if allow_default else 0
    return PrimeExponentSeq.of(exc, default)


@st.composite
def groups(draw):
    t = draw(types())
    d = draw(st.integers(1, 3))
    base = RankOneGroup(t)
    return base if d == 1 else HomogeneousGroup(d, base)


# examples

def test_zpinv_ext():
    for p in (2, 3, 5):
        e = ext_to_Z(zpinv(p))
        assert not e.is_trivial
        assert not e.is_smooth_classification
        assert e.is_essentially_hyperfinite
        assert hom_to_Z(zpinv(p)) == FgAbGroup()


def test_z_is_free():
    G = RankOneGroup(PrimeExponentSeq.of({2: 3, 5: 1}))
    assert hom_to_Z(G) == FgAbGroup.free(1)
    assert ext_to_Z(G).is_trivial


def test_homogeneous_power():
    G = HomogeneousGroup(2, zpinv(3))
    assert hom_to_Z(G) == FgAbGroup()
    assert ext_to_Z(G).borel_class_key == (2, zpinv(3).type)
    assert hom_to_Z(HomogeneousGroup(3, RankOneGroup(PrimeExponentSeq()))) == FgAbGroup.free(3)


def test_positive_default_is_not_free():
    G = RankOneGroup(PrimeExponentSeq.of({2: 0}, default=1))
    assert not G.is_free()
    assert hom_to_Z(G) == FgAbGroup()
    assert not ext_to_Z(G).is_trivial
    T = dual_tower(G)
    assert isinstance(T.tail, PrimePowerTail)
    assert T.tail.multiplier(0) == 3


def test_from_multiplication_tower_example():
    G = from_multiplication_tower(MultiplierSequence((6,), (1,)))
    assert G.type == PrimeExponentSeq.of({2: 1, 3: 1})
    G2 = from_multiplication_tower(multiplication_tower(MultiplierSequence((), (10,))))
    assert G2.type == PrimeExponentSeq.of({2: INF, 5: INF})


def test_canonical_storage():
    a = PrimeExponentSeq.of({3: 1, 2: 1, 5: 0})
    b = PrimeExponentSeq.of({2: 1, 3: 1})
    assert a == b and a.exceptional == ((2, 1), (3, 1))
    c = PrimeExponentSeq.of({2: 1, 3: 1}, default=1)
    assert c.exceptional == ()
    assert PrimeExponentSeq.of({2: 0, 3: INF}, default=1).exceptional == ((2, 0), (3, INF))
    with pytest.raises(ValueError):
        PrimeExponentSeq.of({4: 1})


def test_json_roundtrip():
    for G in (zpinv(2), HomogeneousGroup(2, RankOneGroup(PrimeExponentSeq.of({3: 2}, default=1)))):
        assert group_from_json(json.loads(json.dumps(G.to_json()))) == G
    e = ext_to_Z(zpinv(2)).to_json()
    assert json.loads(json.dumps(e)) == e


def test_ext_with_given_tower():
    T = multiplication_tower(MultiplierSequence((), (2,)))
    assert not ext_to_Z(zpinv(2), tower=T).is_trivial
    with pytest.raises(ValueError):
        ext_to_Z(zpinv(3), tower=T)


# properties

@given(types(), types(), types())
def test_star_equivalence_is_equivalence(a, b, c):
    assert star_equivalent(a, a)
    assert star_equivalent(a, b) == star_equivalent(b, a)
    if star_equivalent(a, b) and star_equivalent(b, c):
        assert star_equivalent(a, c)


@given(types(), st.integers(0, 2**32 - 1))
def test_star_equivalence_by_finite_perturbation(m, seed):
    rng = random.Random(seed)
    exc = dict(m.exceptional)
    for p in rng.sample(PRIMES + [17, 19, 23], 3):
        if m[p] != INF:
            exc[p] = rng.randint(0, 5)
    n = PrimeExponentSeq.of(exc, m.default)
    assert star_equivalent(m, n)
    d = rng.randint(1, 3)
    assert borel_class_key(HomogeneousGroup(d, RankOneGroup(m)) if d > 1 else RankOneGroup(m)) == \
        borel_class_key(HomogeneousGroup(d, RankOneGroup(n)) if d > 1 else RankOneGroup(n))


@given(types(), types())
def test_star_equivalence_against_definition(m, n):
    # finite disagreement set, agreement wherever either side is infinite
    primes = {p for p, _ in m.exceptional} | {p for p, _ in n.exceptional}
    agree_inf = all((m[p] == INF) == (n[p] == INF) for p in primes)
    assert star_equivalent(m, n) == (m.default == n.default and agree_inf)


@given(groups())
def test_three_routes_for_ext_triviality(G):
    e = ext_to_Z(G)
    free = G.is_free()
    ml = mittag_leffler(dual_tower(G), depth=6).status == ZERO
    assert e.is_trivial == free == ml
    assert e.is_trivial == (e.lim1.status == ZERO)
    assert e.is_smooth_classification == e.is_trivial
    assert e.is_essentially_hyperfinite


@given(groups())
def test_hom_two_routes(G):
    closed = FgAbGroup.free(G.rank) if G.is_free() else FgAbGroup()
    assert hom_to_Z(G) == closed == lim(dual_tower(G)).group


@given(st.lists(st.integers(-12, 12).filter(bool), max_size=5),
       st.lists(st.integers(-6, 6).filter(bool), min_size=1, max_size=3), st.randoms())
def test_type_invariant_under_permutation_and_merging(prefix, block, rnd):
    base = from_multiplication_tower(MultiplierSequence(tuple(prefix), tuple(block)))
    perm = list(prefix)
    rnd.shuffle(perm)
    assert from_multiplication_tower(MultiplierSequence(tuple(perm), tuple(block))).type == base.type
    if len(prefix) >= 2:
        merged = [prefix[0] * prefix[1]] + prefix[2:]
        assert from_multiplication_tower(MultiplierSequence(tuple(merged), tuple(block))).type == base.type
    # merging inside the repeating part
    doubled = tuple(block) * 2
    merged_block = tuple(doubled[i] * doubled[i + 1] for i in range(0, len(doubled), 2))
    assert from_multiplication_tower(MultiplierSequence(tuple(prefix), merged_block)).type == base.type


@given(st.lists(st.integers(1, 60), max_size=4), st.lists(st.integers(1, 12), min_size=1, max_size=2))
def test_type_of_multipliers_valuations(prefix, block):
    t = type_of_multipliers(prefix, block)
    for p in PRIMES:
        if any(k % p == 0 for k in block):
            assert t[p] == INF
        else:
            assert t[p] == sum(valuation(k, p) for k in prefix)


@given(groups())
def test_dual_tower_presents_type(G):
    T = dual_tower(G)
    if isinstance(T.tail, PrimePowerTail):
        assert G.type.default > 0
    else:
        assert T.rank1_type() is None or G.rank > 1 or T.rank1_type() == G.type
