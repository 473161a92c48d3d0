"""Rank-1 torsion-free groups, their homogeneous powers, and Hom/Ext into Z.

A rank-1 group is recorded by its prime-exponent sequence m: the group
generated by the rationals 1/p^e with e <= m_p.  Hom and Ext into Z are
computed as lim and lim^1 of the dual tower (Hom(Lambda_n, Z)) of a
cofiltration built from the sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .exactalg import FgAbGroup
from .steinitz import INF, PrimeExponentSeq, type_of_multipliers
from .towers import (AbTower, Lim1Descriptor, MultiplierSequence, PeriodicMatrices,
                     PrimePowerTail, lim, lim1_descriptor, ZERO)


@dataclass(frozen=True)
class RankOneGroup:
    type: PrimeExponentSeq

    @property
    def rank(self) -> int:
        return 1

    def is_free(self) -> bool:
        return self.type.finite_support()

    def to_json(self) -> dict:
        return {"kind": "rank1", "type": self.type.to_json(), "power": 1}


@dataclass(frozen=True)
class HomogeneousGroup:
    """The direct sum of ``rank`` copies of ``base``."""

    rank: int
    base: RankOneGroup

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("homogeneous group needs rank >= 1")

    @property
    def type(self) -> PrimeExponentSeq:
        return self.base.type

    def is_free(self) -> bool:
        return self.base.is_free()

    def to_json(self) -> dict:
        return {"kind": "rank1", "type": self.type.to_json(), "power": self.rank}


TorsionFree = Union[RankOneGroup, HomogeneousGroup]


def group_from_json(obj) -> TorsionFree:
    if obj.get("kind", "rank1") != "rank1":
        raise ValueError(f"unsupported group kind {obj.get('kind')!r}")
    base = RankOneGroup(PrimeExponentSeq.from_json(obj.get("type", {})))
    power = int(obj.get("power", 1))
    return base if power == 1 else HomogeneousGroup(power, base)


def zpinv(p: int) -> RankOneGroup:
    """Z[1/p]."""
    return RankOneGroup(PrimeExponentSeq.of({p: INF}))


def from_multiplication_tower(k: Union[MultiplierSequence, AbTower]) -> RankOneGroup:
    """The colimit of Z --k_0--> Z --k_1--> ... as a rank-1 type."""
    if isinstance(k, AbTower):
        t = k.rank1_type()
        if t is None:
            raise ValueError("not a rank-1 multiplication tower with nonzero multipliers")
        return RankOneGroup(t)
    if any(x == 0 for x in k.prefix + k.block):
        raise ValueError("zero multiplier")
    return RankOneGroup(type_of_multipliers(k.prefix, k.block))


def star_equivalent(m: PrimeExponentSeq, n: PrimeExponentSeq) -> bool:
    """m and n differ at finitely many primes, and only where both are finite."""
    return m.default == n.default and m.infinite_primes == n.infinite_primes


def borel_class_key(G: TorsionFree) -> tuple[int, PrimeExponentSeq]:
    return (G.rank, G.type.star_class())


def _rank_and_type(G: TorsionFree) -> tuple[int, PrimeExponentSeq]:
    return G.rank, G.type


def dual_tower(G: TorsionFree) -> AbTower:
    """The tower Hom(Lambda_n, Z) of a cofiltration of G, on Z^rank.

    Finite exceptional primes p contribute m_p steps of p, in increasing
    prime order.  Primes with infinite exponent repeat once per tail period;
    a positive default exponent is carried by a prime-power tail.
    """
    d, m = _rank_and_type(G)
    steps = []
    inf_product = 1
    for p, e in m.exceptional:
        if e == INF:
            inf_product *= p
        else:
            steps.extend([p] * e)
    prefix = [[[k if i == j else 0 for j in range(d)] for i in range(d)] for k in steps]
    if m.default == 0:
        block = [[inf_product if i == j else 0 for j in range(d)] for i in range(d)]
        return AbTower.free(prefix, [block], d=d)
    base = AbTower.free(prefix, [], d=d)
    tail = PrimePowerTail(m.default, frozenset(p for p, _ in m.exceptional), inf_product, d)
    return AbTower(base.prefix_groups, base.prefix_maps, tail)


def hom_to_Z(G: TorsionFree) -> FgAbGroup:
    """Hom(G, Z): Z^rank when G is free, else 0; checked against lim of the dual tower."""
    closed = FgAbGroup.free(G.rank) if G.is_free() else FgAbGroup()
    via_tower = lim(dual_tower(G)).group
    if via_tower != closed:
        raise AssertionError(f"Hom routes disagree: {closed} vs {via_tower}")
    return closed


@dataclass(frozen=True)
class ExtDescriptor:
    source: TorsionFree
    lim1: Lim1Descriptor
    is_trivial: bool
    is_smooth_classification: bool
    is_essentially_hyperfinite: bool
    borel_class_key: tuple[int, PrimeExponentSeq]
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        d, key_type = self.borel_class_key
        return {"source": self.source.to_json(), "lim1": self.lim1.to_json(),
                "is_trivial": self.is_trivial,
                "is_smooth_classification": self.is_smooth_classification,
                "is_essentially_hyperfinite": self.is_essentially_hyperfinite,
                "borel_class_key": {"rank": d, "type": key_type.to_json()},
                "notes": list(self.notes)}


def _tower_type(T: AbTower) -> Optional[tuple[int, PrimeExponentSeq]]:
    """Rank and type of a tower of scalar maps on Z^d."""
    if T.tail is None:
        return None
    d = T.tail.group.free_rank
    if T.tail.group.torsion_count:
        return None
    if isinstance(T.tail, PrimePowerTail):
        scal = T
    else:
        scal = None
    stages = list(T.prefix_maps) + ([] if scal else [T.tail.step(j) for j in range(T.tail.period)])
    for f in stages:
        M = f.matrix
        if M.rows != d or M.cols != d:
            return None
        k = M[0, 0]
        if any(M[i, j] != (k if i == j else 0) for i in range(d) for j in range(d)):
            return None
    prefix = [f.matrix[0, 0] for f in T.prefix_maps]
    if scal is not None:
        t = T.tail
        rank1 = AbTower.free([[[k]] for k in prefix], [], d=1)
        rank1 = AbTower(rank1.prefix_groups, rank1.prefix_maps, PrimePowerTail(t.exponent, t.skip, t.extra, 1))
        typ = rank1.rank1_type()
    else:
        block = [T.tail.step(j).matrix[0, 0] for j in range(T.tail.period)]
        if any(k == 0 for k in prefix + block):
            return None
        typ = type_of_multipliers(prefix, block)
    return d, typ


def ext_to_Z(G: TorsionFree, tower: Optional[AbTower] = None) -> ExtDescriptor:
    """Ext(G, Z) as lim^1 of a dual tower, with the classification flags."""
    if tower is None:
        tower = dual_tower(G)
    else:
        found = _tower_type(tower)
        if found is None:
            raise ValueError("tower is not a scalar multiplication tower")
        d, typ = found
        if d != G.rank or not star_equivalent(typ, G.type):
            raise ValueError("tower does not present the given group")
    l1 = lim1_descriptor(tower)
    trivial = l1.status == ZERO
    notes = (
        "Ext(G, Z) is lim^1 of the dual tower (Jensen)",
        "cocycle model: symmetric normalized 2-cocycles modulo coboundaries of maps G -> Z",
        "classification by Ext is smooth exactly when G is free; it is essentially hyperfinite at finite rank",
    )
    return ExtDescriptor(G, l1, trivial, trivial, True, borel_class_key(G), notes)
