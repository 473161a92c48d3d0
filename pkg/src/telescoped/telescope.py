"""Mapping telescopes of spheres, tori and finite complexes.

The cohomology of a telescope of X_0 -> X_1 -> ... sits in the exact
sequence 0 -> lim^1 H^{q-1}(X_n) -> H^q -> lim H^q(X_n) -> 0, so each
degree is reported as an asymptotic part (lim^1) and a weak part (lim).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

from .exactalg import AbHom, FgAbGroup, IntMatrix
from .simplicial import (CoefficientGroup, SimplicialComplex, SimplicialMapData, Z, circle,
                         cohomology, induced_map, mapping_cylinder, suspend_map, suspension)
from .steinitz import PrimeExponentSeq
from .torsionfree import (HomogeneousGroup, RankOneGroup, TorsionFree, ext_to_Z,
                          from_multiplication_tower, hom_to_Z, star_equivalent)
from .towers import (AbTower, IdentityTail, Lim1Descriptor, LimResult, MultiplierSequence,
                     PeriodicTail, UnsupportedTower, ZERO, lim, lim1_descriptor,
                     multiplication_tower, TowerCocycle, EventuallyPeriodic, is_coboundary)


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold."""


# ---------------------------------------------------------------------------
# telescope specifications


@dataclass(frozen=True)
class SphereTelescope:
    """S^d -> S^d -> ... with the n-th map of degree k_n."""

    d: int
    degrees: MultiplierSequence

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("sphere dimension must be at least 1")

    def nontrivial(self) -> bool:
        return all(k != 0 for k in self.degrees.prefix + self.degrees.block)

    def to_json(self) -> dict:
        return {"kind": "sphere", "d": self.d, "degrees": self.degrees.to_json()}


@dataclass(frozen=True)
class TorusTelescope:
    """T^d -> T^d -> ... with the n-th map acting on H_1 = Z^d by a matrix."""

    d: int
    prefix: tuple[IntMatrix, ...] = ()
    block: tuple[IntMatrix, ...] = ()

    def __post_init__(self):
        conv = lambda ms: tuple(m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m, self.d) for m in ms)
        object.__setattr__(self, "prefix", conv(self.prefix))
        object.__setattr__(self, "block", conv(self.block) or (IntMatrix.identity(self.d),))
        if self.d < 1:
            raise ValueError("torus dimension must be at least 1")
        for m in self.prefix + self.block:
            if m.rows != self.d or m.cols != self.d:
                raise ValueError(f"torus maps must be {self.d}x{self.d} matrices")

    def nontrivial(self) -> bool:
        return all(m.det() != 0 for m in self.prefix + self.block)

    def scalars(self) -> Optional[MultiplierSequence]:
        """The multipliers when every matrix is scalar."""
        def scal(m):
            k = m[0, 0]
            ok = all(m[i, j] == (k if i == j else 0) for i in range(self.d) for j in range(self.d))
            return k if ok else None
        pre = [scal(m) for m in self.prefix]
        blk = [scal(m) for m in self.block]
        if None in pre or None in blk:
            return None
        return MultiplierSequence(tuple(pre), tuple(blk))

    def to_json(self) -> dict:
        return {"kind": "torus", "d": self.d,
                "matrices": {"prefix": [m.to_rows() for m in self.prefix],
                             "tail": {"kind": "periodic", "block": [m.to_rows() for m in self.block]}}}


@dataclass(frozen=True)
class SimplicialTelescope:
    """Complexes X_0..X_P with maps X_n -> X_{n+1}, then self-maps of X_P cyclically.

    An empty ``tail_maps`` means the sequence is only known up to X_P.
    """

    complexes: tuple[SimplicialComplex, ...]
    maps: tuple[SimplicialMapData, ...]
    tail_maps: tuple[SimplicialMapData, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "complexes", tuple(self.complexes))
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "tail_maps", tuple(self.tail_maps))
        if not self.complexes:
            raise ValueError("a telescope needs at least one complex")
        if len(self.maps) != len(self.complexes) - 1:
            raise ValueError("need one map between consecutive complexes")
        for n, f in enumerate(self.maps):
            if f.source != self.complexes[n] or f.target != self.complexes[n + 1]:
                raise ValueError(f"map {n} does not chain")
        last = self.complexes[-1]
        for f in self.tail_maps:
            if f.source != last or f.target != last:
                raise ValueError("tail maps must be self-maps of the last complex")

    @property
    def start(self) -> int:
        return len(self.complexes) - 1

    def stage(self, n: int) -> SimplicialComplex:
        if n <= self.start:
            return self.complexes[n]
        if not self.tail_maps:
            raise PreconditionError(f"stage {n} lies beyond the given complexes")
        return self.complexes[-1]

    def bonding(self, n: int) -> SimplicialMapData:
        """X_n -> X_{n+1}."""
        if n < self.start:
            return self.maps[n]
        if not self.tail_maps:
            raise PreconditionError(f"map {n} lies beyond the given complexes")
        return self.tail_maps[(n - self.start) % len(self.tail_maps)]

    def to_json(self) -> dict:
        return {"kind": "simplicial", "complexes": [K.to_json() for K in self.complexes],
                "maps": [{"vertex_map": f.to_json()["vertex_map"]} for f in self.maps],
                "tail": None if not self.tail_maps else
                {"kind": "periodic", "maps": [{"vertex_map": f.to_json()["vertex_map"]} for f in self.tail_maps]}}


TelescopeSpec = Union[SphereTelescope, TorusTelescope, SimplicialTelescope]


def _load_ref(obj, base_dir: Optional[str]):
    if isinstance(obj, str):
        import json
        path = obj if base_dir is None else os.path.join(base_dir, obj)
        with open(path) as fh:
            return json.load(fh)
    return obj


def telescope_from_json(obj, base_dir: Optional[str] = None) -> TelescopeSpec:
    kind = obj.get("kind")
    if kind == "sphere":
        return SphereTelescope(int(obj["d"]), MultiplierSequence.from_json(obj["degrees"]))
    if kind == "torus":
        d = int(obj["d"])
        mats = obj["matrices"]
        tail = mats.get("tail", {"kind": "identity"})
        block = tail.get("block", []) if tail.get("kind", "periodic") == "periodic" else []
        return TorusTelescope(d, tuple(mats.get("prefix", [])), tuple(block))
    if kind == "simplicial":
        cx = [SimplicialComplex.from_json(_load_ref(c, base_dir)) for c in obj["complexes"]]
        maps = [SimplicialMapData.from_json(_load_ref(m, base_dir), cx[n], cx[n + 1])
                for n, m in enumerate(obj.get("maps", []))]
        tail = obj.get("tail") or {}
        tmaps = [SimplicialMapData.from_json(_load_ref(m, base_dir), cx[-1], cx[-1])
                 for m in tail.get("maps", [])]
        return SimplicialTelescope(tuple(cx), tuple(maps), tuple(tmaps))
    raise ValueError(f"unknown telescope kind {kind!r}")


# ---------------------------------------------------------------------------
# cohomology towers


def exterior_power(M: IntMatrix, q: int) -> IntMatrix:
    """The q-th exterior power on the lexicographic basis of q-subsets."""
    n = M.rows
    subsets = list(combinations(range(n), q))
    if q == 0:
        return IntMatrix.identity(1)
    return IntMatrix.from_rows([[M.submatrix(I, J).det() for J in subsets] for I in subsets], len(subsets))


def _tensor_coefficients(M: IntMatrix, G: CoefficientGroup) -> tuple[FgAbGroup, IntMatrix]:
    """Free module Z^N with endomorphism M, tensored with the coefficient group."""
    C = G.group
    N = M.rows
    group = FgAbGroup.from_orders([o for o in C.orders for _ in range(N)])
    size = N * C.ngens
    rows = [[0] * size for _ in range(size)]
    for b in range(C.ngens):
        for i in range(N):
            for j in range(N):
                rows[b * N + i][b * N + j] = M[i, j]
    return group, IntMatrix.from_rows(rows, size)


def _closed_form_tower(prefix: list[IntMatrix], block: list[IntMatrix], G: CoefficientGroup) -> AbTower:
    """Tower of Z^N (x) G with bonding maps M_n (x) id."""
    parts_pre = [_tensor_coefficients(M, G) for M in prefix]
    parts_blk = [_tensor_coefficients(M, G) for M in block]
    group = parts_blk[0][0]
    if group.ngens == 0:
        return AbTower((), (), IdentityTail(group))
    maps = tuple(AbHom(group, group, m) for _, m in parts_pre)
    groups = tuple(group for _ in parts_pre)
    tail = PeriodicTail(group, tuple(AbHom(group, group, m) for _, m in parts_blk))
    return AbTower(groups, maps, tail)


def _trivial_tower() -> AbTower:
    return AbTower((), (), IdentityTail(FgAbGroup()))


def cohomology_tower(tel: TelescopeSpec, q: int, G: CoefficientGroup = Z) -> AbTower:
    """The tower H^q(X_n; G) with maps induced by the bonding maps."""
    if q < 0:
        return _trivial_tower()
    if isinstance(tel, SphereTelescope):
        if q == 0:
            return _closed_form_tower([], [IntMatrix.identity(1)], G)
        if q != tel.d:
            return _trivial_tower()
        k = tel.degrees
        return _closed_form_tower([IntMatrix.diagonal([x]) for x in k.prefix],
                                  [IntMatrix.diagonal([x]) for x in k.block], G)
    if isinstance(tel, TorusTelescope):
        if q > tel.d:
            return _trivial_tower()
        return _closed_form_tower([exterior_power(m.T, q) for m in tel.prefix],
                                  [exterior_power(m.T, q) for m in tel.block], G)
    if isinstance(tel, SimplicialTelescope):
        P = tel.start
        groups = tuple(cohomology(tel.stage(n), q, G) for n in range(P + (1 if not tel.tail_maps else 0)))
        if not tel.tail_maps:
            maps = tuple(induced_map(tel.bonding(n), q, G) for n in range(P))
            return AbTower(groups, maps, None)
        maps = tuple(induced_map(tel.bonding(n), q, G) for n in range(P))
        H = cohomology(tel.stage(P), q, G)
        tail = PeriodicTail(H, tuple(induced_map(f, q, G) for f in tel.tail_maps))
        return AbTower(groups, maps, tail)
    raise TypeError("unknown telescope kind")


# ---------------------------------------------------------------------------
# Milnor decomposition


@dataclass(frozen=True)
class MilnorReport:
    q: int
    asymptotic: Lim1Descriptor
    weak: LimResult
    total: str
    closed_form: Optional[dict] = None

    @property
    def vanishes(self) -> bool:
        return self.asymptotic.is_zero and self.weak.group.is_trivial()

    def to_json(self) -> dict:
        return {"q": self.q, "asymptotic": self.asymptotic.to_json(), "weak": self.weak.to_json(),
                "total": self.total, "closed_form": self.closed_form}


def colimit_group(tel: TelescopeSpec) -> Optional[TorsionFree]:
    """The colimit of H_1 (tori) or of the top homology (spheres) when it is a homogeneous group."""
    if isinstance(tel, SphereTelescope):
        if not tel.nontrivial():
            return None
        return from_multiplication_tower(tel.degrees)
    if isinstance(tel, TorusTelescope):
        s = tel.scalars()
        if s is None or not tel.nontrivial():
            return None
        base = from_multiplication_tower(s)
        return base if tel.d == 1 else HomogeneousGroup(tel.d, base)
    return None


def _closed_form(tel: TelescopeSpec, q: int) -> Optional[dict]:
    """Hom/Ext values of the colimit group attached in the degrees they describe."""
    lam = colimit_group(tel)
    if lam is None:
        return None
    hom_deg = tel.d if isinstance(tel, SphereTelescope) else 1
    top = tel.d + 1
    if q == hom_deg:
        return {"weak_is_Hom": str(hom_to_Z(lam)), "group": lam.to_json()}
    if q == hom_deg + 1:
        e = ext_to_Z(lam)
        return {"asymptotic_is_Ext": "trivial" if e.is_trivial else "nontrivial", "group": lam.to_json()}
    if q > top:
        return {"vanishes": True}
    return None


def milnor(tel: TelescopeSpec, q: int, G: CoefficientGroup = Z, depth: Optional[int] = None) -> MilnorReport:
    if q < 0:
        raise PreconditionError("degree must be nonnegative")
    asym = lim1_descriptor(cohomology_tower(tel, q - 1, G), depth)
    weak = lim(cohomology_tower(tel, q, G))
    a_zero = asym.status == ZERO
    w_zero = weak.group.is_trivial()
    if asym.status not in (ZERO, "NonZero"):
        total = f"weak part {weak.group}; asymptotic part undetermined"
    elif a_zero and w_zero:
        total = "0"
    elif a_zero:
        total = f"{weak.group} (equal to the weak part)"
    elif w_zero:
        total = "equal to the asymptotic part, a nonzero lim^1 group"
    else:
        total = f"extension of the weak part {weak.group} by a nonzero lim^1 group (extension data unresolved)"
    return MilnorReport(q, asym, weak, total, _closed_form(tel, q))


# ---------------------------------------------------------------------------
# simplicial models and truncations


def _circle_map(m_src: int, m_tgt: int, k: int) -> SimplicialMapData:
    """Degree-k map from the m_src-gon to the m_tgt-gon (m_src = |k| m_tgt, or equal when k = 0)."""
    src, tgt = circle(m_src), circle(m_tgt)
    if k == 0:
        return SimplicialMapData.constant(src, tgt, 0)
    sign = 1 if k > 0 else -1
    return SimplicialMapData(src, tgt, {i: (sign * i) % m_tgt for i in range(m_src)})


def simplicial_model(tel: SphereTelescope, N: int) -> SimplicialTelescope:
    """Stages X_0..X_N of a sphere telescope as polygons (suspended for d > 1)."""
    if not isinstance(tel, SphereTelescope):
        raise PreconditionError("simplicial models are built for sphere telescopes")
    if N < 1:
        raise PreconditionError("need at least one stage map")
    ks = [tel.degrees.at(n) for n in range(N)]
    sizes = [3] * (N + 1)
    for n in range(N - 1, -1, -1):
        sizes[n] = sizes[n + 1] * max(abs(ks[n]), 1)
    maps = [_circle_map(sizes[n], sizes[n + 1], ks[n]) for n in range(N)]
    cx = [circle(m) for m in sizes]
    for _ in range(tel.d - 1):
        maps = [suspend_map(f) for f in maps]
        cx = [suspension(K) for K in cx]
    return SimplicialTelescope(tuple(cx), tuple(maps), ())


def _truncation(tel: SimplicialTelescope, N: int) -> tuple[SimplicialComplex, list[dict]]:
    if not isinstance(tel, SimplicialTelescope):
        raise PreconditionError("truncated telescopes need a simplicial telescope")
    if N < 1:
        raise PreconditionError("need N >= 1")
    labels: list[dict] = []
    nxt = 0
    for n in range(N + 1):
        lab = {}
        for v in tel.stage(n).vertices:
            lab[v] = nxt
            nxt += 1
        labels.append(lab)
    facets = []
    for n in range(N):
        f = tel.bonding(n)
        M, top, bottom = mapping_cylinder(f)
        glue = {top(v): labels[n][v] for v in f.source.vertices}
        glue.update({bottom(w): labels[n + 1][w] for w in f.target.vertices})
        facets.extend(tuple(glue[v] for v in face) for face in M.facets)
    K = SimplicialComplex(tuple(range(nxt)), tuple(facets))
    return K, labels


def truncated_telescope(tel: SimplicialTelescope, N: int) -> SimplicialComplex:
    """N mapping cylinders glued along their shared stages."""
    return _truncation(tel, N)[0]


def stage_inclusion(tel: SimplicialTelescope, N: int, n: int) -> SimplicialMapData:
    """Inclusion of X_n into the N-stage truncation."""
    K, labels = _truncation(tel, N)
    return SimplicialMapData(tel.stage(n), K, labels[n])


# ---------------------------------------------------------------------------
# reports


def _dimension_bound(tel: TelescopeSpec) -> int:
    if isinstance(tel, (SphereTelescope, TorusTelescope)):
        return tel.d
    return max(K.dimension for K in tel.complexes)


def hopf_bracket(tel: TelescopeSpec, d: int, G: CoefficientGroup = Z) -> dict:
    """Homotopy classes into S^(d+1) through H^(d+1), once higher cohomology vanishes."""
    top = _dimension_bound(tel)
    for q in range(d + 2, top + 2):
        if not milnor(tel, q, G).vanishes:
            raise PreconditionError(f"H^{q} does not vanish; Hopf's theorem does not apply")
    rep = milnor(tel, d + 1, G)
    return {
        "target_sphere": d + 1,
        "cohomology_degree": d + 1,
        "bracket": rep.total,
        "phantom_part": rep.asymptotic.to_json(),
        "weak_part": str(rep.weak.group),
        "all_phantom": rep.weak.group.is_trivial(),
        "closed_form": rep.closed_form,
        "vanishing_checked_through": top + 1,
    }


EQUIVALENT, INEQUIVALENT, UNDETERMINED = "Equivalent", "Inequivalent", "Undetermined"


@dataclass(frozen=True)
class ClassificationVerdict:
    verdict: str
    evidence: dict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


def _as_sphere(tel: TelescopeSpec) -> TelescopeSpec:
    if isinstance(tel, TorusTelescope) and tel.d == 1:
        s = tel.scalars()
        return SphereTelescope(1, s)
    return tel


def _invariants(lam: TorsionFree) -> dict:
    e = ext_to_Z(lam)
    return {"type": lam.type.to_json(), "star_class": lam.type.star_class().to_json(),
            "hom": str(hom_to_Z(lam)), "ext_trivial": e.is_trivial}


def classify(telA: TelescopeSpec, telB: TelescopeSpec) -> ClassificationVerdict:
    """Homotopy classification of sphere telescopes and homogeneous torus telescopes."""
    a, b = _as_sphere(telA), _as_sphere(telB)
    if isinstance(a, SimplicialTelescope) or isinstance(b, SimplicialTelescope):
        return ClassificationVerdict(UNDETERMINED, {"reason": "simplicial telescopes are not classified"})
    if a.d != b.d:
        raise PreconditionError(f"dimension mismatch: {a.d} vs {b.d}")
    if type(a) is not type(b):
        return ClassificationVerdict(UNDETERMINED, {"reason": "sphere and torus telescopes of dimension > 1"})
    if not (a.nontrivial() and b.nontrivial()):
        return ClassificationVerdict(UNDETERMINED, {"reason": "a bonding map has degree zero"})
    la, lb = colimit_group(a), colimit_group(b)
    if la is None or lb is None:
        return ClassificationVerdict(UNDETERMINED, {"reason": "torus maps are not all scalar"})
    same = star_equivalent(la.type, lb.type)
    evidence = {"kind": "sphere" if isinstance(a, SphereTelescope) else "torus", "d": a.d,
                "A": _invariants(la), "B": _invariants(lb),
                "criterion": "types agree up to finitely many finite changes"}
    return ClassificationVerdict(EQUIVALENT if same else INEQUIVALENT, evidence)


def borsuk_eilenberg(p: int, depth: Optional[int] = None) -> dict:
    """Maps from the p-adic solenoid complement to S^2, via the circle telescope of degree p."""
    if p < 2:
        raise PreconditionError("p must be at least 2")
    tel = SphereTelescope(1, MultiplierSequence((), (p,)))
    rep = milnor(tel, 2, depth=depth)
    lam = from_multiplication_tower(tel.degrees)
    ext = ext_to_Z(lam)
    T = multiplication_tower(tel.degrees)
    ones = TowerCocycle(T, EventuallyPeriodic((), ((1,),)))
    verdict = is_coboundary(ones, depth)
    return {
        "prime": p,
        "model": tel.to_json(),
        "milnor_q2": rep.to_json(),
        "ext": ext.to_json(),
        "ext_nontrivial": not ext.is_trivial,
        "smooth": ext.is_smooth_classification,
        "essentially_hyperfinite": ext.is_essentially_hyperfinite,
        "bracket_is_phantom": rep.weak.group.is_trivial(),
        "sample_cocycle": {"cocycle": ones.to_json(), "coboundary": verdict.to_json()},
    }
