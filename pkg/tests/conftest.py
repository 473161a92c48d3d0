import math
import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from telescoped.exactalg import IntMatrix
from telescoped.simplicial import SimplicialComplex

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def small_int(lo=-6, hi=6):
    return st.integers(lo, hi)


@st.composite
def int_matrices(draw, max_rows=4, max_cols=4, lo=-6, hi=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = [[draw(st.integers(lo, hi)) for _ in range(c)] for _ in range(r)]
    return IntMatrix.from_rows(rows, c)


@st.composite
def square_matrices(draw, n=None, lo=-5, hi=5):
    n = draw(st.integers(1, 3)) if n is None else n
    return IntMatrix.from_rows([[draw(st.integers(lo, hi)) for _ in range(n)] for _ in range(n)], n)


def random_complex(rng: random.Random, max_vertices=8, max_dim=3, max_facets=6) -> SimplicialComplex:
    nv = rng.randint(1, max_vertices)
    facets = []
    for _ in range(rng.randint(1, max_facets)):
        k = rng.randint(1, min(max_dim + 1, nv))
        facets.append(tuple(sorted(rng.sample(range(nv), k))))
    used = sorted({v for f in facets for v in f})
    return SimplicialComplex(tuple(used), tuple(facets))


@st.composite
def complexes(draw, max_vertices=7, max_dim=3, max_facets=5):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_complex(random.Random(seed), max_vertices, max_dim, max_facets)


@pytest.fixture
def data_dir():
    return DATA


# random periodic towers

TORSION_SHAPES = [(), (2,), (3,), (6,), (2, 2), (2, 4), (3, 3), (2, 6)]


def random_endo_rows(rng: random.Random, moduli, free_rank, lo=-3, hi=3):
    """Rows of a well-defined endomorphism of Z/m_1 + ... + Z^free_rank."""
    t = len(moduli)
    n = t + free_rank
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i < t and j < t:
                step = moduli[i] // math.gcd(moduli[i], moduli[j])
                rows[i][j] = step * rng.randint(0, moduli[i])
            elif i < t:
                rows[i][j] = rng.randint(0, moduli[i] - 1)
            elif j < t:
                rows[i][j] = 0
            else:
                rows[i][j] = rng.randint(lo, hi)
    return rows


def random_periodic_tower(rng: random.Random, max_gens=3):
    """(tower, G, period composite rows) for a random periodic tower on one group."""
    from telescoped.exactalg import AbHom, FgAbGroup, IntMatrix
    from telescoped.towers import AbTower, PeriodicTail
    while True:
        moduli = list(rng.choice(TORSION_SHAPES))
        free = rng.randint(0, max_gens - len(moduli))
        if moduli or free:
            break
    G = FgAbGroup(free, tuple(moduli))
    n = G.ngens

    def endo():
        return AbHom(G, G, IntMatrix.from_rows(random_endo_rows(rng, moduli, free), n))

    prefix = [endo() for _ in range(rng.randint(0, 2))]
    block = [endo() for _ in range(rng.randint(1, 2))]
    T = AbTower((G,) * len(prefix), tuple(prefix), PeriodicTail(G, tuple(block)))
    Phi = AbHom.identity(G)
    for e in block:
        Phi = Phi.compose(e)
    return T, G, Phi.matrix.to_rows()


# acceptance reporting

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
