import json
import random

import pytest
from hypothesis import given, strategies as st

from telescoped.exactalg import FgAbGroup, IntMatrix
from telescoped.simplicial import (CoefficientGroup, SimplicialComplex, SimplicialMapData, SimplicialPair,
                                   Z, are_contiguous, barycentric_subdivision, circle, coboundary_matrix,
                                   cohomology, connecting_map, degree, induced_map, les_is_exact,
                                   les_of_pair, mapping_cylinder, nerve, simplex, sphere_boundary,
                                   star_cover, suspend_map, suspension, torus7, wrap_map)

from conftest import complexes, random_complex
from oracles import canonical, cohomology_mod, integral_cohomology


def as_pair(G: FgAbGroup):
    return G.free_rank, G.invariant_factors


def ref(K, n, sub=None):
    sf = sub.facets if sub is not None else ()
    return canonical(*integral_cohomology(K.facets, n, sf))


# examples

def test_sphere_cohomology():
    for d in (1, 2, 3):
        S = sphere_boundary(d)
        for q in range(d + 2):
            assert cohomology(S, q) == (FgAbGroup.free(1) if q in (0, d) else FgAbGroup())
            assert cohomology(S, q, CoefficientGroup.mod(6)) == (FgAbGroup(0, (6,)) if q in (0, d) else FgAbGroup())


def test_torus():
    T = torus7()
    assert [cohomology(T, q) for q in range(3)] == [FgAbGroup.free(1), FgAbGroup.free(2), FgAbGroup.free(1)]
    assert T.euler_characteristic() == 0


def test_projective_plane_torsion():
    # 6-vertex RP^2
    facets = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
              (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    K = SimplicialComplex.from_facets(facets)
    assert cohomology(K, 1) == FgAbGroup()
    assert cohomology(K, 2) == FgAbGroup(0, (2,))
    assert cohomology(K, 1, CoefficientGroup.mod(2)) == FgAbGroup(0, (2,))
    assert cohomology(K, 2, CoefficientGroup.parse("Z+Zmod:2")) == FgAbGroup(0, (2, 2))


def test_relative_cohomology_disk():
    pair_sub = sphere_boundary(1)
    D = simplex(2)
    assert cohomology(D, 2, pair_sub=pair_sub) == FgAbGroup.free(1)
    assert cohomology(D, 1, pair_sub=pair_sub) == FgAbGroup()


def test_degree_examples():
    C3 = circle(3)
    assert degree(SimplicialMapData.identity(C3)) == 1
    assert degree(SimplicialMapData.constant(C3, C3, 0)) == 0
    assert abs(degree(wrap_map(3, 2))) == 2
    refl = SimplicialMapData(C3, C3, {0: 0, 1: 2, 2: 1})
    assert degree(refl) == -1


def test_degree_multiplicative():
    f = wrap_map(6, 2)   # 12-gon -> 6-gon
    g = wrap_map(3, 2)   # 6-gon -> 3-gon
    assert degree(g.compose(f)) == degree(g) * degree(f)


def test_connecting_map_iso():
    pair = SimplicialPair(simplex(2), sphere_boundary(1))
    delta = connecting_map(pair, 1)
    assert delta.is_isomorphism()


def test_contiguous_maps_agree():
    C4 = circle(4)
    cone = SimplicialComplex.from_facets([(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)])
    f = SimplicialMapData(C4, cone, {i: i for i in range(4)})
    g = SimplicialMapData(C4, cone, {0: 4, 1: 1, 2: 2, 3: 3})
    assert are_contiguous(f, g)
    for n in range(2):
        assert induced_map(f, n) == induced_map(g, n)


def test_json_roundtrip():
    K = torus7()
    assert SimplicialComplex.from_json(json.loads(json.dumps(K.to_json()))) == K
    f = wrap_map(3, 2)
    assert SimplicialMapData.from_json(f.to_json(), f.source, f.target) == f


def test_invalid_inputs():
    with pytest.raises(ValueError):
        SimplicialComplex((0, 1), ((0, 2),))
    with pytest.raises(ValueError):
        SimplicialMapData(circle(3), circle(4), {0: 0, 1: 2, 2: 1})
    with pytest.raises(ValueError):
        SimplicialPair(circle(3), SimplicialComplex.from_facets([(0, 5)]))
    with pytest.raises(ValueError):
        CoefficientGroup.mod(1)


# properties

@given(complexes())
def test_coboundary_squares_to_zero(K):
    for n in range(K.dimension):
        assert (coboundary_matrix(K, n + 1) @ coboundary_matrix(K, n)).is_zero()


@given(complexes(max_vertices=6))
def test_cohomology_matches_oracle(K):
    for n in range(K.dimension + 2):
        assert as_pair(cohomology(K, n)) == ref(K, n)


@given(complexes(max_vertices=6), st.sampled_from([2, 3, 4, 6]))
def test_cohomology_mod_matches_uct(K, m):
    for n in range(K.dimension + 1):
        assert as_pair(cohomology(K, n, CoefficientGroup.mod(m))) == canonical(*cohomology_mod(K.facets, n, m))


@given(complexes(max_vertices=6))
def test_euler_characteristic(K):
    assert K.euler_characteristic() == sum((-1) ** n * cohomology(K, n).free_rank for n in range(K.dimension + 1))


@given(complexes(max_vertices=6), st.randoms())
def test_relabel_invariance(K, rnd):
    targets = list(range(100, 100 + len(K.vertices)))
    rnd.shuffle(targets)
    L = K.relabel(dict(zip(K.vertices, targets)))
    for n in range(K.dimension + 1):
        assert cohomology(L, n) == cohomology(K, n)


@given(complexes(max_vertices=5, max_dim=2, max_facets=4))
def test_subdivision_invariance(K):
    sd, sel = barycentric_subdivision(K)
    for n in range(K.dimension + 1):
        assert cohomology(sd, n) == cohomology(K, n)
        assert induced_map(sel, n).is_isomorphism()


@given(complexes(max_vertices=6))
def test_nerve_of_star_cover(K):
    N = nerve(star_cover(K))
    for n in range(K.dimension + 1):
        assert cohomology(N, n) == cohomology(K, n)


@given(complexes(max_vertices=6))
def test_les_exact_random_pairs(K):
    rng = random.Random(len(K.facets))
    sub_facets = [f for f in K.facets if rng.random() < 0.5]
    faces = [f for n in range(K.dimension + 1) for f in K.faces(n)]
    sub_facets += [rng.choice(faces)]
    L = SimplicialComplex.from_facets(sub_facets)
    maps = les_of_pair(SimplicialPair(K, L), Z, max_degree=K.dimension)
    assert les_is_exact(maps)
    # relative groups agree with the oracle
    for n in range(K.dimension + 1):
        assert as_pair(cohomology(K, n, pair_sub=L)) == ref(K, n, L)


def test_mapping_cylinder_retraction():
    f = wrap_map(3, 2)
    M, top, bottom = mapping_cylinder(f)
    for n in range(3):
        assert cohomology(M, n) == cohomology(f.target, n)
        assert induced_map(bottom, n).is_isomorphism()
    # the top inclusion realises f on cohomology
    assert induced_map(top, 1).matrix == induced_map(f, 1).compose(
        induced_map(bottom, 1)).matrix


def test_suspension_shifts_degree():
    f = wrap_map(3, 3)
    sf = suspend_map(f)
    assert cohomology(suspension(circle(3)), 2) == FgAbGroup.free(1)
    assert abs(degree(sf)) == 3
