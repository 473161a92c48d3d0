"""Towers of finitely generated abelian groups: lim, lim^1 and the lim^1 action.

A tower ``G_0 <- G_1 <- ...`` is stored as a finite prefix of groups and
bonding maps followed by a tail rule describing every later stage.  The
bonding map ``eta^n`` goes from ``G_{n+1}`` to ``G_n``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import islice
from typing import Optional, Sequence, Union

from sympy import Matrix, Poly, factor_list, symbols

from .exactalg import (AbHom, FgAbGroup, IntMatrix, Lattice, image, index_in,
                       kernel, lattice_sum, parse_group, quotient, saturation,
                       smith_normal_form)
from .steinitz import PrimeExponentSeq, primes_skipping, type_of_multipliers, prime_factors, INF

Vector = tuple[int, ...]

DEFAULT_PROBE_DEPTH = 64
PROBE_DEPTH_ENV = "TELESCOPED_PROBE_DEPTH"


class UnsupportedTower(ValueError):
    """The tower's tail rule is outside the fragment an operation handles."""


class IncompatibleDescriptions(ValueError):
    """Cocycle descriptions that cannot be combined."""


def probe_depth(override: Optional[int] = None) -> int:
    if override is not None:
        depth = int(override)
    else:
        depth = int(os.environ.get(PROBE_DEPTH_ENV, DEFAULT_PROBE_DEPTH))
    if depth < 1:
        raise ValueError("probe depth must be positive")
    return depth


# ---------------------------------------------------------------------------
# tail rules


@dataclass(frozen=True)
class IdentityTail:
    group: FgAbGroup

    @property
    def period(self) -> int:
        return 1

    def step(self, j: int) -> AbHom:
        return AbHom.identity(self.group)

    def to_json(self) -> dict:
        return {"kind": "identity", "group": str(self.group)}


@dataclass(frozen=True)
class ConstantTail:
    group: FgAbGroup
    endo: AbHom

    def __post_init__(self):
        if self.endo.source != self.group or self.endo.target != self.group:
            raise ValueError("constant tail endomorphism must act on the tail group")

    @property
    def period(self) -> int:
        return 1

    def step(self, j: int) -> AbHom:
        return self.endo

    def to_json(self) -> dict:
        return {"kind": "constant", "group": str(self.group), "endo": self.endo.matrix.to_rows()}


@dataclass(frozen=True)
class PeriodicTail:
    """Endomorphisms of one group applied cyclically."""

    group: FgAbGroup
    endos: tuple[AbHom, ...]

    def __post_init__(self):
        object.__setattr__(self, "endos", tuple(self.endos))
        if not self.endos:
            raise ValueError("periodic tail needs at least one map")
        for e in self.endos:
            if e.source != self.group or e.target != self.group:
                raise ValueError("periodic tail maps must be endomorphisms of the tail group")

    @property
    def period(self) -> int:
        return len(self.endos)

    def step(self, j: int) -> AbHom:
        return self.endos[j % len(self.endos)]

    def to_json(self) -> dict:
        if self.group.torsion_count == 0:
            return {"kind": "periodic", "d": self.group.free_rank,
                    "matrices": [e.matrix.to_rows() for e in self.endos]}
        return {"kind": "periodic", "group": str(self.group),
                "matrices": [e.matrix.to_rows() for e in self.endos]}


def PeriodicMatrices(d: int, matrices: Sequence) -> PeriodicTail:
    """Square integer matrices applied cyclically on Z^d."""
    G = FgAbGroup.free(d)
    endos = []
    for M in matrices:
        M = M if isinstance(M, IntMatrix) else IntMatrix.from_rows(M, d)
        if M.rows != d or M.cols != d:
            raise ValueError(f"periodic tail matrices must be {d}x{d}")
        endos.append(AbHom(G, G, M))
    return PeriodicTail(G, tuple(endos))


@dataclass(frozen=True)
class PrimePowerTail:
    """Scalar maps ``extra * p_j^exponent`` on Z^rank, p_j running over primes not in ``skip``.

    This presents towers whose multipliers are never eventually periodic,
    such as the dual tower of a rank-1 type with positive default exponent.
    """

    exponent: int
    skip: frozenset[int] = frozenset()
    extra: int = 1
    rank: int = 1

    def __post_init__(self):
        object.__setattr__(self, "skip", frozenset(self.skip))
        if self.exponent < 1:
            raise ValueError("prime-power tail needs a positive exponent")
        if self.extra == 0 or self.rank < 1:
            raise ValueError("prime-power tail needs a nonzero factor and positive rank")

    @property
    def group(self) -> FgAbGroup:
        return FgAbGroup.free(self.rank)

    @property
    def period(self) -> None:
        return None

    def multiplier(self, j: int) -> int:
        p = next(islice(primes_skipping(self.skip), j, None))
        return self.extra * p ** self.exponent

    def step(self, j: int) -> AbHom:
        k = self.multiplier(j)
        return AbHom(self.group, self.group, IntMatrix.diagonal([k] * self.rank))

    def to_json(self) -> dict:
        return {"kind": "prime_power", "exponent": self.exponent, "skip": sorted(self.skip),
                "extra": self.extra, "rank": self.rank}


Tail = Union[IdentityTail, ConstantTail, PeriodicTail, PrimePowerTail]


def _tail_from_json(obj) -> Optional[Tail]:
    if obj is None:
        return None
    kind = obj.get("kind")
    if kind == "identity":
        return IdentityTail(_group_from_json(obj["group"]))
    if kind == "constant":
        G = _group_from_json(obj["group"])
        return ConstantTail(G, AbHom(G, G, IntMatrix.from_rows(obj["endo"], G.ngens)))
    if kind == "periodic":
        if "group" in obj:
            G = _group_from_json(obj["group"])
            return PeriodicTail(G, tuple(AbHom(G, G, IntMatrix.from_rows(m, G.ngens))
                                         for m in obj["matrices"]))
        return PeriodicMatrices(int(obj["d"]), obj["matrices"])
    if kind == "prime_power":
        return PrimePowerTail(int(obj["exponent"]), frozenset(obj.get("skip", ())),
                              int(obj.get("extra", 1)), int(obj.get("rank", 1)))
    raise ValueError(f"unknown tail kind {kind!r}")


def _group_from_json(obj) -> FgAbGroup:
    if isinstance(obj, str):
        return parse_group(obj)
    return FgAbGroup.from_json(obj)


# ---------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class AbTower:
    """Stages ``prefix_groups`` followed by the tail group repeated forever.

    With a tail, ``prefix_maps[n]`` is eta^n : G_{n+1} -> G_n for every
    prefix stage, the last one leaving the tail group.  Without a tail the
    tower is only known up to its last prefix stage.
    """

    prefix_groups: tuple[FgAbGroup, ...]
    prefix_maps: tuple[AbHom, ...]
    tail: Optional[Tail]

    def __post_init__(self):
        object.__setattr__(self, "prefix_groups", tuple(self.prefix_groups))
        object.__setattr__(self, "prefix_maps", tuple(self.prefix_maps))
        P = len(self.prefix_groups)
        if self.tail is None:
            if P == 0:
                raise ValueError("a tower without a tail rule needs at least one stage")
            if len(self.prefix_maps) != P - 1:
                raise ValueError("an explicit tower needs one map between consecutive stages")
        elif len(self.prefix_maps) != P:
            raise ValueError("each prefix stage needs its bonding map")
        for n, f in enumerate(self.prefix_maps):
            if f.target != self.prefix_groups[n] or f.source != self.group(n + 1):
                raise ValueError(f"bonding map {n} does not chain: {f.source} -> {f.target}")

    # construction helpers

    @classmethod
    def identity(cls, G: FgAbGroup) -> "AbTower":
        return cls((), (), IdentityTail(G))

    @classmethod
    def constant(cls, G: FgAbGroup, endo: AbHom) -> "AbTower":
        return cls((), (), ConstantTail(G, endo))

    @classmethod
    def free(cls, prefix_matrices: Sequence = (), tail_matrices: Sequence = (),
             d: Optional[int] = None) -> "AbTower":
        """Tower of free groups; prefix matrix n has shape rank_n x rank_{n+1}."""
        tail_matrices = [m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m) for m in tail_matrices]
        if d is None:
            if not tail_matrices:
                raise ValueError("tail dimension unknown")
            d = tail_matrices[0].rows
        tail = PeriodicMatrices(d, tail_matrices) if tail_matrices else IdentityTail(FgAbGroup.free(d))
        mats = [m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m) for m in prefix_matrices]
        ranks = [m.rows for m in mats] + [d]
        groups = tuple(FgAbGroup.free(r) for r in ranks[:-1])
        maps = tuple(AbHom(FgAbGroup.free(ranks[n + 1]), groups[n], m) for n, m in enumerate(mats))
        return cls(groups, maps, tail)

    # access

    @property
    def start(self) -> int:
        """Index of the first stage governed by the tail rule."""
        return len(self.prefix_groups)

    def group(self, n: int) -> FgAbGroup:
        if n < len(self.prefix_groups):
            return self.prefix_groups[n]
        if self.tail is None:
            raise UnsupportedTower(f"stage {n} lies beyond the explicit prefix")
        return self.tail.group

    def bond(self, n: int) -> AbHom:
        """eta^n : G_{n+1} -> G_n."""
        if n < len(self.prefix_maps):
            return self.prefix_maps[n]
        if self.tail is None:
            raise UnsupportedTower(f"bonding map {n} lies beyond the explicit prefix")
        return self.tail.step(n - self.start)

    def composite(self, n: int, k: int) -> AbHom:
        """G_{n+k} -> G_n."""
        out = AbHom.identity(self.group(n))
        for j in range(n, n + k):
            out = out.compose(self.bond(j))
        return out

    def tail_period(self) -> Optional[int]:
        return None if self.tail is None else self.tail.period

    def drop_first(self) -> "AbTower":
        """The tower starting at stage 1."""
        if self.prefix_groups:
            return AbTower(self.prefix_groups[1:], self.prefix_maps[1:], self.tail)
        if isinstance(self.tail, PrimePowerTail):
            t = self.tail
            first = next(primes_skipping(t.skip))
            return AbTower((), (), PrimePowerTail(t.exponent, t.skip | {first}, t.extra, t.rank))
        if isinstance(self.tail, PeriodicTail):
            e = self.tail.endos
            return AbTower((), (), PeriodicTail(self.tail.group, e[1:] + e[:1]))
        return self

    # rank-1 multiplication towers

    def multipliers(self) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
        """(prefix multipliers, periodic block) when every stage is Z; None otherwise.

        A prime-power tail yields a block of None.
        """
        Z = FgAbGroup.free(1)
        if self.tail is None or any(G != Z for G in self.prefix_groups) or self.tail.group != Z:
            return None
        prefix = tuple(f.matrix[0, 0] for f in self.prefix_maps)
        if isinstance(self.tail, PrimePowerTail):
            return prefix, None
        return prefix, tuple(self.tail.step(j).matrix[0, 0] for j in range(self.tail.period))

    def rank1_type(self) -> Optional[PrimeExponentSeq]:
        data = self.multipliers()
        if data is None:
            return None
        prefix, block = data
        if any(k == 0 for k in prefix) or (block is not None and any(k == 0 for k in block)):
            return None
        if block is not None:
            return type_of_multipliers(prefix, block)
        t = self.tail
        base = type_of_multipliers(prefix)
        exc = {}
        for p in {q for q, _ in base.exceptional} | set(t.skip) | set(prime_factors(t.extra)):
            if t.extra % p == 0:
                exc[p] = INF
            else:
                exc[p] = base[p] + (0 if p in t.skip else t.exponent)
        return PrimeExponentSeq(tuple(exc.items()), t.exponent)

    # serialization

    def to_json(self) -> dict:
        prefix = []
        for n, G in enumerate(self.prefix_groups):
            entry = {"group": str(G)}
            if n < len(self.prefix_maps):
                entry["map"] = self.prefix_maps[n].matrix.to_rows()
            prefix.append(entry)
        return {"prefix": prefix, "tail": None if self.tail is None else self.tail.to_json()}

    @classmethod
    def from_json(cls, obj) -> "AbTower":
        tail = _tail_from_json(obj.get("tail"))
        entries = obj.get("prefix", [])
        groups = tuple(_group_from_json(e["group"]) for e in entries)
        maps = []
        for n, e in enumerate(entries):
            if "map" not in e:
                continue
            src = groups[n + 1] if n + 1 < len(groups) else (tail.group if tail else None)
            if src is None:
                raise ValueError("final explicit stage cannot carry a map without a tail")
            maps.append(AbHom(src, groups[n], IntMatrix.from_rows(e["map"], src.ngens)))
        return cls(groups, tuple(maps), tail)


@dataclass(frozen=True)
class MultiplierSequence:
    """Integers k_0, k_1, ...: a finite prefix, then ``block`` repeated."""

    prefix: tuple[int, ...] = ()
    block: tuple[int, ...] = (1,)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(k) for k in self.prefix))
        object.__setattr__(self, "block", tuple(int(k) for k in self.block))
        if not self.block:
            raise ValueError("the repeating block must be nonempty")

    def at(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.block[(n - len(self.prefix)) % len(self.block)]

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "tail": {"kind": "periodic", "block": list(self.block)}}

    @classmethod
    def from_json(cls, obj) -> "MultiplierSequence":
        tail = obj.get("tail", {"kind": "periodic", "block": [1]})
        if tail.get("kind", "periodic") == "identity":
            block = (1,)
        elif tail.get("kind", "periodic") == "periodic":
            block = tuple(tail["block"])
        else:
            raise ValueError(f"unknown degree tail kind {tail.get('kind')!r}")
        return cls(tuple(obj.get("prefix", ())), block)


def multiplication_tower(seq: MultiplierSequence) -> AbTower:
    """The tower (Z, x k_n)."""
    return AbTower.free([[[k]] for k in seq.prefix], [[[k]] for k in seq.block], d=1)


# ---------------------------------------------------------------------------
# limits


@dataclass(frozen=True)
class LimResult:
    """lim of a tower.

    ``embedding`` maps the limit injectively into the first tail stage
    G_start; ``base_map`` is the projection to G_0.
    """

    group: FgAbGroup
    embedding: AbHom
    base_map: AbHom
    certificate: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"group": str(self.group), "embedding": self.embedding.matrix.to_rows(),
                "base_map": self.base_map.matrix.to_rows(), "certificate": self.certificate}


def _int_matrix_power_poly(coeffs: Sequence[int], M: list[list[int]]) -> IntMatrix:
    """Evaluate the polynomial (coefficients high to low) at the square matrix M."""
    n = len(M)
    A = IntMatrix.from_rows(M, n)
    out = IntMatrix.zeros(n, n)
    for c in coeffs:
        out = out @ A
        out = IntMatrix.from_rows([[out[i, j] + (c if i == j else 0) for j in range(n)] for i in range(n)], n)
    return out


@dataclass(frozen=True)
class _FreeAnalysis:
    """Eventual behaviour of a square integer matrix C on Z^r."""

    eventual: Lattice        # saturated eventual image W
    units: Lattice           # the largest sublattice on which C acts invertibly
    restricted_det: int      # det of C on W
    unit_factor: str         # product of unit-constant characteristic factors


def _analyse_free(C: IntMatrix) -> _FreeAnalysis:
    r = C.rows
    if r == 0:
        z = Lattice.zero(0)
        return _FreeAnalysis(z, z, 1, "1")
    P = IntMatrix.identity(r)
    for _ in range(r):
        P = C @ P
    W = saturation(image(P))
    w = W.rank
    if w == 0:
        return _FreeAnalysis(W, W, 1, "1")
    basis = W.vectors()
    cols = [W.coords(C @ b) for b in basis]
    Cw = IntMatrix.from_columns(cols, w)
    det = Cw.det()
    if abs(det) == 1:
        return _FreeAnalysis(W, W, det, "unimodular")
    x = symbols("x")
    cp = Matrix(Cw.to_rows()).charpoly(x).as_expr()
    _, factors = factor_list(cp, x)
    g = Poly(1, x)
    names = []
    for f, e in factors:
        fp = Poly(f, x)
        if abs(fp.eval(0)) == 1:
            g = g * fp ** e
            names.append(f"({fp.as_expr()})^{e}")
    if g.degree() == 0:
        return _FreeAnalysis(W, Lattice.zero(r), det, "1")
    gC = _int_matrix_power_poly([int(c) for c in g.all_coeffs()], Cw.to_rows())
    U = kernel(gC)
    units = Lattice.span([tuple(sum(u[i] * basis[i][t] for i in range(w)) for t in range(r))
                          for u in U.vectors()], r)
    return _FreeAnalysis(W, units, det, "*".join(names))


def _unimodular_inverse(M: IntMatrix) -> IntMatrix:
    sd = smith_normal_form(M)
    if any(abs(d) != 1 for d in sd.diagonal) or len(sd.diagonal) != M.rows:
        raise ValueError("matrix is not unimodular")
    # U M V = S with S = diag(+-1)  =>  M^{-1} = V S U
    return sd.V @ sd.S @ sd.U


def _lim_constant(G: FgAbGroup, Phi: AbHom) -> tuple[FgAbGroup, AbHom, dict]:
    """lim of the constant tower (G, Phi), embedded in G by the first coordinate."""
    t = G.torsion_count
    r = G.free_rank
    M = Phi.matrix
    C = M.submatrix(range(t, t + r), range(t, t + r))
    A = M.submatrix(range(t), range(t))
    analysis = _analyse_free(C)

    # stable image of Phi on the torsion subgroup
    T = FgAbGroup(0, G.invariant_factors)
    A_hom = AbHom(T, T, A)
    rel_T = T.relation_lattice()
    cur = Lattice.full(t)
    steps = 0
    while True:
        nxt = lattice_sum(Lattice.span([A_hom.matrix @ v for v in cur.vectors()], t), rel_T)
        if nxt == cur:
            break
        cur = nxt
        steps += 1
    S = cur

    N = max(steps, 1)
    gens = [tuple(v) + (0,) * r for v in S.vectors()]
    units = analysis.units
    u = units.rank
    if u:
        ub = units.vectors()
        Cu = IntMatrix.from_columns([units.coords(C @ b) for b in ub], u)
        Cu_inv = _unimodular_inverse(Cu)
        PhiN = AbHom.identity(G)
        for _ in range(N):
            PhiN = PhiN.compose(Phi)
        for i in range(u):
            z = tuple(int(i == j) for j in range(u))
            for _ in range(N):
                z = Cu_inv @ z
            zbar = tuple(sum(z[j] * ub[j][s] for j in range(u)) for s in range(r))
            gens.append(PhiN.matrix @ ((0,) * t + zbar))
    rel = G.relation_lattice()
    L = lattice_sum(Lattice.span(gens, G.ngens), rel)
    q = quotient(L, rel)
    emb = AbHom(q.group, G, IntMatrix.from_columns(q.reps, G.ngens) if q.reps else IntMatrix.zeros(G.ngens, 0))
    cert = {"eventual_image_rank": analysis.eventual.rank, "unit_rank": u,
            "restricted_det": analysis.restricted_det, "unit_factor": analysis.unit_factor,
            "torsion_stable_after": steps}
    return q.group, emb, cert


def _period_composite(T: AbTower) -> AbHom:
    tail = T.tail
    out = AbHom.identity(tail.group)
    for j in range(tail.period):
        out = out.compose(tail.step(j))
    return out


def lim(T: AbTower) -> LimResult:
    """The group of threads, computed from one period of the tail."""
    if T.tail is None:
        raise UnsupportedTower("lim needs a tail rule")
    P = T.start
    down = T.composite(0, P)
    if isinstance(T.tail, PrimePowerTail):
        G0 = FgAbGroup()
        emb = AbHom.zero(G0, T.tail.group)
        return LimResult(G0, emb, down.compose(emb),
                         {"tail_start": P, "reason": "every tail step multiplies by an integer of size at least 2"})
    Phi = _period_composite(T)
    group, emb, cert = _lim_constant(T.tail.group, Phi)
    cert = {"tail_start": P, "period": T.tail.period, **cert}
    return LimResult(group, emb, down.compose(emb), cert)


# ---------------------------------------------------------------------------
# Mittag-Leffler and lim^1


ZERO, NONZERO, UNDETERMINED = "Zero", "NonZero", "Undetermined"


@dataclass(frozen=True)
class Lim1Status:
    status: str
    certificate: dict

    def to_json(self) -> dict:
        return {"status": self.status, "certificate": self.certificate}


@dataclass(frozen=True)
class Lim1Descriptor:
    status: str
    certificate: dict
    rank1_type: Optional[PrimeExponentSeq] = None
    notes: tuple[str, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.status == ZERO

    def to_json(self) -> dict:
        return {"status": self.status, "certificate": self.certificate,
                "rank1_type": None if self.rank1_type is None else self.rank1_type.to_json(),
                "notes": list(self.notes)}


def _images_stabilize(G: FgAbGroup, Phi: AbHom, cap: int) -> Optional[int]:
    """Least k with Phi^k(G) = Phi^(k+1)(G), searched up to ``cap``."""
    rel = G.relation_lattice()
    cur = Lattice.full(G.ngens)
    for k in range(cap + 1):
        nxt = lattice_sum(Lattice.span([Phi.matrix @ v for v in cur.vectors()], G.ngens), rel)
        if nxt == cur:
            return k
        cur = nxt
    return None


def _free_index_chain(C_steps, r: int, skip: int, count: int) -> list[Optional[int]]:
    """Indices [I_k : I_{k+1}] of images of composed steps, for k = skip .. skip+count-1."""
    cur = Lattice.full(r)
    out = []
    for k in range(skip + count):
        nxt = Lattice.span([C_steps(k) @ v for v in cur.vectors()], r)
        if k >= skip:
            out.append(index_in(cur, nxt))
        cur = nxt
    return out


def mittag_leffler(T: AbTower, depth: Optional[int] = None) -> Lim1Status:
    depth = probe_depth(depth)
    if T.tail is None:
        return Lim1Status(UNDETERMINED, {"depth": len(T.prefix_groups), "probe_depth": depth,
                                         "reason": "no tail rule beyond the explicit stages"})
    P = T.start
    tail = T.tail
    if isinstance(tail, PrimePowerTail):
        r = tail.rank
        chain = _free_index_chain(lambda k: tail.step(k).matrix, r, 0, depth)
        return Lim1Status(NONZERO, {"tail_start": P, "probe_depth": depth, "index_chain": chain,
                                    "reason": "every tail step is a scalar of size at least 2"})
    G = tail.group
    Phi = _period_composite(T)
    t, r = G.torsion_count, G.free_rank
    C = Phi.matrix.submatrix(range(t, t + r), range(t, t + r))
    analysis = _analyse_free(C)
    if analysis.units.rank == analysis.eventual.rank:
        k = _images_stabilize(G, Phi, 4 * G.ngens + depth)
        if k is None:
            raise AssertionError("image chain failed to stabilize for a unimodular eventual action")
        return Lim1Status(ZERO, {"tail_start": P, "period": tail.period, "stable_after_periods": k,
                                 "eventual_image_rank": analysis.eventual.rank,
                                 "restricted_det": analysis.restricted_det, "probe_depth": depth})
    chain = _free_index_chain(lambda k: C, r, r, depth)
    return Lim1Status(NONZERO, {"tail_start": P, "period": tail.period,
                                "eventual_image_rank": analysis.eventual.rank,
                                "unit_rank": analysis.units.rank,
                                "restricted_det": analysis.restricted_det,
                                "index_chain_from_period": r, "index_chain": chain,
                                "probe_depth": depth})


def lim1_descriptor(T: AbTower, depth: Optional[int] = None) -> Lim1Descriptor:
    st = mittag_leffler(T, depth)
    typ = T.rank1_type() if T.tail is not None else None
    notes = []
    if typ is not None:
        notes.append("rank-1 multiplication tower: lim^1 of the dual tower of a rank-1 group "
                     "is Ext of that group with Z (Jensen)")
        notes.append("vanishes exactly when the type has finite support and finite entries")
    return Lim1Descriptor(st.status, st.certificate, typ, tuple(notes))


# ---------------------------------------------------------------------------
# cocycles


@dataclass(frozen=True)
class EventuallyZero:
    values: tuple[Vector, ...]

    @property
    def start(self) -> int:
        return len(self.values)

    def value(self, n: int, zero: Vector) -> Vector:
        return self.values[n] if n < len(self.values) else zero

    def to_json(self) -> dict:
        return {"eventually_zero": [list(v) for v in self.values]}


@dataclass(frozen=True)
class EventuallyPeriodic:
    prefix: tuple[Vector, ...]
    block: tuple[Vector, ...]

    @property
    def start(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.block)

    def value(self, n: int, zero: Vector = ()) -> Vector:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.block[(n - len(self.prefix)) % len(self.block)]

    def to_json(self) -> dict:
        return {"eventually_periodic": {"prefix": [list(v) for v in self.prefix],
                                        "block": [list(v) for v in self.block]}}


Description = Union[EventuallyZero, EventuallyPeriodic]


def _as_vec(x) -> Vector:
    if isinstance(x, int):
        return (x,)
    return tuple(int(a) for a in x)


def _canonical_periodic(values, start: int, period: int, floor: int) -> EventuallyPeriodic:
    """Minimal period, then minimal start no earlier than ``floor``."""
    best = period
    for q in range(1, period + 1):
        if period % q == 0 and all(values(start + i) == values(start + i + q) for i in range(period)):
            best = q
            break
    s = start
    while s > floor and values(s - 1) == values(s - 1 + best):
        s -= 1
    while s < floor:
        s += 1
    return EventuallyPeriodic(tuple(values(n) for n in range(s)),
                              tuple(values(n) for n in range(s, s + best)))


@dataclass(frozen=True)
class TowerCocycle:
    """A finitely described element of the product of the stages."""

    tower: AbTower
    description: Description

    def __post_init__(self):
        T = self.tower
        d = self.description
        if isinstance(d, EventuallyZero):
            vals = []
            for n, v in enumerate(d.values):
                vals.append(T.group(n).reduce(_as_vec(v)))
            while vals and not any(vals[-1]):
                vals.pop()
            object.__setattr__(self, "description", EventuallyZero(tuple(vals)))
            return
        if not isinstance(d, EventuallyPeriodic):
            raise TypeError("unknown cocycle description")
        if T.tail is None or isinstance(T.tail, PrimePowerTail):
            raise IncompatibleDescriptions("periodic descriptions need a periodic, constant or identity tail")
        if not d.block:
            raise ValueError("periodic block must be nonempty")
        raw = [_as_vec(v) for v in d.prefix] + [_as_vec(v) for v in d.block]
        s, L = len(d.prefix), len(d.block)

        def raw_at(n):
            return raw[n] if n < s else raw[s + (n - s) % L]

        horizon = max(s, T.start) + L
        cache = [T.group(n).reduce(raw_at(n)) for n in range(horizon)]

        def val(n):
            if n < horizon:
                return cache[n]
            return cache[max(s, T.start) + (n - max(s, T.start)) % L]

        canon = _canonical_periodic(val, max(s, T.start), L, T.start)
        if not any(any(v) for v in canon.block):
            vals = list(canon.prefix)
            while vals and not any(vals[-1]):
                vals.pop()
            canon = EventuallyZero(tuple(vals))
        object.__setattr__(self, "description", canon)

    def value(self, n: int) -> Vector:
        return self.description.value(n, self.tower.group(n).zero())

    @property
    def is_eventually_zero(self) -> bool:
        d = self.description
        return isinstance(d, EventuallyZero) or all(not any(v) for v in d.block)

    def to_json(self) -> dict:
        return self.description.to_json()

    @classmethod
    def from_json(cls, tower: AbTower, obj) -> "TowerCocycle":
        if "eventually_zero" in obj:
            return cls(tower, EventuallyZero(tuple(_as_vec(v) for v in obj["eventually_zero"])))
        if "eventually_periodic" in obj:
            p = obj["eventually_periodic"]
            return cls(tower, EventuallyPeriodic(tuple(_as_vec(v) for v in p.get("prefix", [])),
                                                 tuple(_as_vec(v) for v in p["block"])))
        raise ValueError("cocycle JSON needs 'eventually_zero' or 'eventually_periodic'")

    @classmethod
    def zero(cls, tower: AbTower) -> "TowerCocycle":
        return cls(tower, EventuallyZero(()))


def _add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def action_apply(g: TowerCocycle, h: TowerCocycle) -> TowerCocycle:
    """(g.h)_n = g_n + h_n - eta^n(g_{n+1})."""
    if g.tower != h.tower:
        raise IncompatibleDescriptions("cocycles live on different towers")
    T = h.tower

    def val(n):
        return T.group(n).reduce(_sub(_add(g.value(n), h.value(n)), T.bond(n)(g.value(n + 1))))

    dg, dh = g.description, h.description
    if isinstance(dg, EventuallyZero) and isinstance(dh, EventuallyZero):
        N = max(dg.start, dh.start) + 1
        return TowerCocycle(T, EventuallyZero(tuple(val(n) for n in range(N))))
    if T.tail is None or isinstance(T.tail, PrimePowerTail):
        raise IncompatibleDescriptions("periodic descriptions need a periodic, constant or identity tail")
    periods = [T.tail.period] + [d.period for d in (dg, dh) if isinstance(d, EventuallyPeriodic)]
    L = reduce(math.lcm, periods)
    S = max(dg.start, dh.start, T.start)
    return TowerCocycle(T, EventuallyPeriodic(tuple(val(n) for n in range(S)),
                                              tuple(val(n) for n in range(S, S + L))))


YES, NO = "YES", "NO"


@dataclass(frozen=True)
class CoboundaryVerdict:
    verdict: str
    witness: Optional[TowerCocycle]
    certificate: dict

    def to_json(self) -> dict:
        return {"verdict": self.verdict,
                "witness": None if self.witness is None else self.witness.to_json(),
                "certificate": self.certificate}


def _back_substitute(T: AbTower, h: TowerCocycle, top: int, g_top: list[Vector]) -> list[Vector]:
    """g_n = h_n + eta^n(g_{n+1}) for n < top, given g_top = [g_top, ...]."""
    out = list(g_top)
    nxt = g_top[0] if g_top else T.group(top).zero()
    below = []
    for n in range(top - 1, -1, -1):
        nxt = T.group(n).reduce(_add(h.value(n), T.bond(n)(nxt)))
        below.append(nxt)
    return below[::-1] + out


def k_adic_value(T: AbTower, h: TowerCocycle, offset: Optional[int] = None) -> Fraction:
    """The rational sum of h_{P+j} k_{P} ... k_{P+j-1} over a rank-1 periodic tail.

    Requires the product of one tail period to have size at least 2.
    """
    mult = T.multipliers()
    if mult is None or mult[1] is None:
        raise UnsupportedTower("k-adic value needs a rank-1 periodic tail")
    block = mult[1]
    P = T.start if offset is None else offset
    d = h.description
    s = max(d.start - P, 0)
    L = math.lcm(len(block), d.period if isinstance(d, EventuallyPeriodic) else 1)
    K = 1
    for i in range(L):
        K *= block[(s + i) % len(block)]
    if abs(K) < 2:
        raise UnsupportedTower("tail multipliers are units")
    total = Fraction(0)
    pi = 1
    for j in range(s):
        total += h.value(P + j)[0] * pi
        pi *= block[j % len(block)]
    inner = Fraction(0)
    rel = 1
    for i in range(L):
        inner += h.value(P + s + i)[0] * rel
        rel *= block[(s + i) % len(block)]
    return total + pi * inner / (1 - K)


def is_coboundary(h: TowerCocycle, depth: Optional[int] = None) -> CoboundaryVerdict:
    T = h.tower
    depth = probe_depth(depth)
    if isinstance(h.description, EventuallyZero) or h.is_eventually_zero:
        top = h.description.start
        g = _back_substitute(T, h, top, [])
        w = TowerCocycle(T, EventuallyZero(tuple(g)))
        return CoboundaryVerdict(YES, w, {"method": "back-substitution", "support": top})
    mult = T.multipliers()
    if mult is not None and mult[1] is not None:
        block = mult[1]
        d = h.description
        P = T.start
        s = max(d.start - P, 0)
        L = math.lcm(len(block), d.period)
        K = 1
        for i in range(L):
            K *= block[i % len(block)]
        if abs(K) >= 2:
            v = k_adic_value(T, h)
            if v.denominator != 1:
                return CoboundaryVerdict(NO, None, {"method": "k-adic value", "value": str(v),
                                                    "reason": "the k-adic sum is not an integer"})
            # forward recursion from g_P = v, exact at every step
            g = [int(v)]
            for j in range(s + L):
                k = block[j % len(block)]
                num = g[-1] - h.value(P + j)[0]
                if num % k:
                    raise AssertionError("k-adic witness failed to be integral")
                g.append(num // k)
            if g[s + L] != g[s]:
                raise AssertionError("k-adic witness is not periodic")
            tail_vals = [(x,) for x in g[:s + L]]
            full = _back_substitute(T, h, P, tail_vals)
            w = TowerCocycle(T, EventuallyPeriodic(tuple(full[:P + s]), tuple(full[P + s:P + s + L])))
            if action_apply(w, TowerCocycle.zero(T)) != h:
                raise AssertionError("witness does not reproduce the cocycle")
            return CoboundaryVerdict(YES, w, {"method": "k-adic value", "value": str(v)})
    ml = mittag_leffler(T, depth)
    if ml.status == ZERO:
        return CoboundaryVerdict(YES, None, {"method": "Mittag-Leffler", "ml": ml.certificate})
    return CoboundaryVerdict(UNDETERMINED, None, {"probe_depth": depth,
                                                  "reason": "outside the decidable fragment"})
