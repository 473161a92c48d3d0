"""Finite simplicial complexes and their cohomology.

Cochains use the alternating model: one basis cochain per face, the face's
vertices listed in increasing label order.  Relative cochains are obtained
by deleting the faces of the subcomplex.  Coefficients are finite direct
sums of Z and Z/m; a cochain with coefficients in G = G_0 + ... + G_{s-1}
is stored as s consecutive blocks, one integer per face in each block.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import gcd
from typing import Iterable, Mapping, Optional, Sequence

from .exactalg import (
    AbHom,
    FgAbGroup,
    IntMatrix,
    _quotient_from_relations,
    is_exact_at,
    smith_normal_form,
    solve_integer,
)

Face = tuple[int, ...]


# ---------------------------------------------------------------------------
# complexes and maps


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple[int, ...]
    facets: tuple[Face, ...]

    def __post_init__(self):
        verts = tuple(sorted(set(int(v) for v in self.vertices)))
        cleaned = sorted({tuple(sorted(set(int(v) for v in f))) for f in self.facets if f},
                         key=lambda f: (-len(f), f))
        maximal: list[Face] = []
        for f in cleaned:
            fs = set(f)
            if not any(fs <= set(g) for g in maximal):
                maximal.append(f)
        vset = set(verts)
        covered = set()
        for f in maximal:
            if not set(f) <= vset:
                raise ValueError(f"facet {f} uses vertices outside the vertex list")
            covered.update(f)
        maximal.extend((v,) for v in verts if v not in covered)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "facets", tuple(sorted(maximal)))
        object.__setattr__(self, "_faces", {})
        object.__setattr__(self, "_lock", threading.Lock())

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        facets = [tuple(f) for f in facets]
        return cls(tuple(v for f in facets for v in f), tuple(facets))

    @classmethod
    def empty(cls) -> "SimplicialComplex":
        return cls((), ())

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.facets), default=-1)

    def faces(self, n: int) -> tuple[Face, ...]:
        """Sorted n-dimensional faces (materialized on first request)."""
        if n < 0:
            return ()
        with self._lock:
            got = self._faces.get(n)
            if got is None:
                acc = set()
                for f in self.facets:
                    if len(f) > n:
                        acc.update(combinations(f, n + 1))
                got = tuple(sorted(acc))
                self._faces[n] = got
        return got

    def all_faces(self) -> list[Face]:
        return [f for n in range(self.dimension + 1) for f in self.faces(n)]

    def has_face(self, face: Iterable[int]) -> bool:
        fs = set(face)
        return any(fs <= set(f) for f in self.facets)

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * len(self.faces(n)) for n in range(self.dimension + 1))

    def relabel(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        return SimplicialComplex(tuple(mapping[v] for v in self.vertices),
                                 tuple(tuple(mapping[v] for v in f) for f in self.facets))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(other.has_face(f) for f in self.facets)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "facets": [list(f) for f in self.facets]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SimplicialComplex":
        facets = [tuple(int(v) for v in f) for f in obj.get("facets", [])]
        verts = obj.get("vertices")
        if verts is None:
            verts = [v for f in facets for v in f]
        return cls(tuple(int(v) for v in verts), tuple(facets))


@dataclass(frozen=True)
class SimplicialPair:
    complex: SimplicialComplex
    sub: SimplicialComplex

    def __post_init__(self):
        if not self.sub.is_subcomplex_of(self.complex):
            raise ValueError("invalid pair: sub is not a subcomplex")


@dataclass(frozen=True, eq=False)
class SimplicialMapData:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Mapping[int, int]

    def __post_init__(self):
        vm = {int(k): int(v) for k, v in dict(self.vertex_map).items()}
        object.__setattr__(self, "vertex_map", vm)
        missing = [v for v in self.source.vertices if v not in vm]
        if missing:
            raise ValueError(f"vertex map undefined on {missing}")
        for f in self.source.facets:
            img = self.image(f)
            if not self.target.has_face(img):
                raise ValueError(f"image {img} of face {f} is not a face of the target")

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    def image(self, face: Iterable[int]) -> Face:
        return tuple(sorted({self.vertex_map[v] for v in face}))

    def __eq__(self, other):
        return (isinstance(other, SimplicialMapData) and self.source == other.source
                and self.target == other.target
                and all(self.vertex_map[v] == other.vertex_map[v] for v in self.source.vertices))

    def compose(self, inner: "SimplicialMapData") -> "SimplicialMapData":
        """``self after inner``."""
        return SimplicialMapData(inner.source, self.target,
                                 {v: self.vertex_map[inner.vertex_map[v]] for v in inner.source.vertices})

    @classmethod
    def identity(cls, K: SimplicialComplex) -> "SimplicialMapData":
        return cls(K, K, {v: v for v in K.vertices})

    @classmethod
    def constant(cls, source: SimplicialComplex, target: SimplicialComplex, vertex: int) -> "SimplicialMapData":
        return cls(source, target, {v: vertex for v in source.vertices})

    def to_json(self) -> dict:
        return {"vertex_map": {str(v): self.vertex_map[v] for v in self.source.vertices}}

    @classmethod
    def from_json(cls, obj: Mapping, source: SimplicialComplex, target: SimplicialComplex) -> "SimplicialMapData":
        return cls(source, target, {int(k): int(v) for k, v in obj["vertex_map"].items()})


def are_contiguous(f: SimplicialMapData, g: SimplicialMapData) -> bool:
    if f.source != g.source or f.target != g.target:
        return False
    return all(f.target.has_face(set(f.image(s)) | set(g.image(s))) for s in f.source.facets)


# ---------------------------------------------------------------------------
# coefficients


@dataclass(frozen=True)
class CoefficientGroup:
    """Direct sum of cyclic groups; modulus 0 stands for Z."""

    moduli: tuple[int, ...] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if not self.moduli:
            raise ValueError("empty coefficient group")
        for m in self.moduli:
            if m != 0 and m < 2:
                raise ValueError(f"modulus {m} must be >= 2")

    @classmethod
    def integers(cls) -> "CoefficientGroup":
        return cls((0,))

    @classmethod
    def mod(cls, m: int) -> "CoefficientGroup":
        return cls((m,))

    @classmethod
    def direct_sum(cls, parts: Sequence["CoefficientGroup"]) -> "CoefficientGroup":
        return cls(tuple(m for p in parts for m in p.moduli))

    @classmethod
    def parse(cls, text: str) -> "CoefficientGroup":
        """``Z``, ``Zmod:6``, ``Z+Zmod:2``."""
        moduli = []
        pos = 0
        for part in text.split("+"):
            token = part.strip()
            if token == "Z":
                moduli.append(0)
            elif token.startswith("Zmod:") and token[5:].isdigit() and int(token[5:]) >= 2:
                moduli.append(int(token[5:]))
            else:
                raise ValueError(f"bad coefficient summand {token!r} at position {pos}")
            pos += len(part) + 1
        return cls(tuple(moduli))

    @property
    def group(self) -> FgAbGroup:
        return FgAbGroup.from_orders(self.moduli)

    def __str__(self):
        return "+".join("Z" if m == 0 else f"Zmod:{m}" for m in self.moduli)


Z = CoefficientGroup.integers()


@dataclass(frozen=True)
class CoverData:
    """A cover by pieces, each the union of open stars of a vertex set."""

    base: SimplicialComplex
    pieces: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        pieces = tuple((int(lbl), tuple(sorted(set(vs)))) for lbl, vs in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise ValueError("empty cover")
        covered = set()
        for _, vs in pieces:
            covered.update(vs)
        if not set(self.base.vertices) <= covered:
            raise ValueError("pieces do not cover the vertex set")
        if len({lbl for lbl, _ in pieces}) != len(pieces):
            raise ValueError("duplicate piece labels")


# ---------------------------------------------------------------------------
# cochains


def coboundary_matrix(K: SimplicialComplex, n: int, sub: Optional[SimplicialComplex] = None) -> IntMatrix:
    """Matrix of the coboundary from n-cochains to (n+1)-cochains.

    Rows index (n+1)-faces, columns n-faces, both sorted; faces of ``sub``
    are removed when given.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    rows_f = _basis(K, sub, n + 1)
    cols_f = _basis(K, sub, n)
    col_index = {f: j for j, f in enumerate(cols_f)}
    out = []
    for tau in rows_f:
        row = [0] * len(cols_f)
        for i in range(len(tau)):
            j = col_index.get(tau[:i] + tau[i + 1:])
            if j is not None:
                row[j] += -1 if i % 2 else 1
        out.append(row)
    return IntMatrix.from_rows(out, len(cols_f))


def _basis(K: SimplicialComplex, sub: Optional[SimplicialComplex], n: int) -> tuple[Face, ...]:
    faces = K.faces(n)
    if sub is None or not sub.vertices:
        return faces
    drop = set(sub.faces(n))
    return tuple(f for f in faces if f not in drop)


@dataclass
class _Cohomology:
    group: FgAbGroup
    reps: list[tuple[int, ...]]      # ambient cochains, blocked by coefficient summand
    blocks: list[tuple]              # per summand: (modulus, scales, selected indices)
    V_inv: IntMatrix
    to_group: IntMatrix
    width: int                       # number of basis faces

    def coords(self, cochain: Sequence[int]) -> tuple[int, ...]:
        c = self.width
        z = []
        for b, (m, scales, sel) in enumerate(self.blocks):
            y = self.V_inv @ tuple(cochain[b * c:(b + 1) * c])
            for i in range(c):
                s = scales[i]
                if s is None:
                    if y[i] if m == 0 else y[i] % m:
                        raise ValueError("cochain is not a cocycle")
                    continue
                q, r = divmod(y[i], s)
                if r:
                    raise ValueError("cochain is not a cocycle")
                z.append(q)
        if not self.group.ngens:
            return ()
        return self.group.reduce(self.to_group @ z)


class _CochainModel:
    def __init__(self, K: SimplicialComplex, L: Optional[SimplicialComplex], G: CoefficientGroup):
        self.K, self.L, self.G = K, L, G
        self._lock = threading.RLock()
        self._delta: dict[int, IntMatrix] = {}
        self._snf = {}
        self._coh: dict[int, _Cohomology] = {}

    def basis(self, n: int) -> tuple[Face, ...]:
        return _basis(self.K, self.L, n)

    def delta(self, n: int) -> IntMatrix:
        with self._lock:
            if n not in self._delta:
                if n < 0:
                    self._delta[n] = IntMatrix.zeros(len(self.basis(0)), 0)
                else:
                    self._delta[n] = coboundary_matrix(self.K, n, self.L)
            return self._delta[n]

    def cohomology(self, n: int) -> _Cohomology:
        with self._lock:
            if n not in self._coh:
                self._coh[n] = self._compute(n)
            return self._coh[n]

    def _compute(self, n: int) -> _Cohomology:
        c = len(self.basis(n))
        d_next = self.delta(n)
        d_prev = self.delta(n - 1)
        sd = smith_normal_form(d_next)
        diag = sd.diagonal
        r = sd.rank
        prev_y = sd.V_inv @ d_prev if d_prev.cols else None
        basis_vecs = []
        blocks = []
        rel_cols: list[list[tuple[int, int]]] = []   # sparse columns (row, value)
        offset = 0
        s_count = len(self.G.moduli)
        for b, m in enumerate(self.G.moduli):
            scales: list[Optional[int]] = []
            sel = []
            for i in range(c):
                if i < r:
                    scales.append(m // gcd(m, diag[i]) if m else None)
                else:
                    scales.append(1)
                if scales[-1] is not None:
                    sel.append(i)
            pos = {i: offset + k for k, i in enumerate(sel)}
            for i in sel:
                v = [0] * (s_count * c)
                col = sd.V.col(i)
                for t in range(c):
                    v[b * c + t] = col[t] * scales[i]
                basis_vecs.append(v)
            if prev_y is not None:
                for j in range(prev_y.cols):
                    entries = []
                    for i in sel:
                        y = prev_y[i, j]
                        if y:
                            entries.append((pos[i], y // scales[i]))
                    rel_cols.append(entries)
            if m:
                for i in sel:
                    rel_cols.append([(pos[i], m // scales[i])])
            blocks.append((m, scales, sel))
            offset += len(sel)
        k = offset
        X = [[0] * len(rel_cols) for _ in range(k)]
        for j, entries in enumerate(rel_cols):
            for i, v in entries:
                X[i][j] = v
        q = _quotient_from_relations(basis_vecs, IntMatrix.from_rows(X, len(rel_cols)), s_count * c)
        return _Cohomology(q.group, list(q.reps), blocks, sd.V_inv, q._to_group, c)


@lru_cache(maxsize=512)
def _model(K: SimplicialComplex, L: Optional[SimplicialComplex], G: CoefficientGroup) -> _CochainModel:
    return _CochainModel(K, L, G)


def cohomology(K: SimplicialComplex, n: int, G: CoefficientGroup = Z,
               pair_sub: Optional[SimplicialComplex] = None) -> FgAbGroup:
    """H^n(K; G), or H^n(K, pair_sub; G) when a subcomplex is given."""
    if pair_sub is not None:
        SimplicialPair(K, pair_sub)
    if n < 0:
        return FgAbGroup()
    return _model(K, pair_sub, G).cohomology(n).group


def _pullback_matrix(vertex_map: Mapping[int, int], src: Sequence[Face], tgt: Sequence[Face]) -> list[list[int]]:
    """Rows: source basis faces; columns: target basis faces."""
    index = {f: j for j, f in enumerate(tgt)}
    out = []
    for sigma in src:
        row = [0] * len(tgt)
        img = [vertex_map[v] for v in sigma]
        if len(set(img)) == len(img):
            j = index.get(tuple(sorted(img)))
            if j is not None:
                row[j] = _perm_sign(img)
        out.append(row)
    return out


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def _apply_blocks(P: list[list[int]], vec: Sequence[int], nblocks: int, width: int) -> list[int]:
    out = []
    for b in range(nblocks):
        part = vec[b * width:(b + 1) * width]
        for row in P:
            out.append(sum(x * y for x, y in zip(row, part) if x))
    return out


def _hom_on_cohomology(src: _CochainModel, tgt: _CochainModel, n: int,
                       vertex_map: Mapping[int, int]) -> AbHom:
    """H^n(tgt) -> H^n(src) induced by pulling back along ``vertex_map``."""
    hs, ht = src.cohomology(n), tgt.cohomology(n)
    P = _pullback_matrix(vertex_map, src.basis(n), tgt.basis(n))
    nb = len(src.G.moduli)
    cols = [hs.coords(_apply_blocks(P, rep, nb, ht.width)) for rep in ht.reps]
    return AbHom(ht.group, hs.group, IntMatrix.from_columns(cols, hs.group.ngens))


def induced_map(f: SimplicialMapData, n: int, G: CoefficientGroup = Z) -> AbHom:
    """The homomorphism H^n(target; G) -> H^n(source; G)."""
    return _hom_on_cohomology(_model(f.source, None, G), _model(f.target, None, G), n, f.vertex_map)


def degree(f: SimplicialMapData, d: Optional[int] = None) -> int:
    """Mapping degree between two triangulated cohomology d-spheres.

    The sign is relative to the generators chosen by the Smith pipeline.
    """
    if d is None:
        d = f.source.dimension
    ZZ = FgAbGroup.free(1)
    for K in (f.source, f.target):
        if cohomology(K, d) != ZZ or d < 1:
            raise ValueError(f"not a cohomology {d}-sphere: H^{d} = {cohomology(K, d)}")
    return induced_map(f, d).matrix[0, 0]


# ---------------------------------------------------------------------------
# long exact sequence of a pair


def connecting_map(pair: SimplicialPair, n: int, G: CoefficientGroup = Z) -> AbHom:
    """H^n(L) -> H^{n+1}(K, L): lift, apply the coboundary, read off relatively."""
    K, L = pair.complex, pair.sub
    mL, mK, mKL = _model(L, None, G), _model(K, None, G), _model(K, L, G)
    hL, hKL = mL.cohomology(n), mKL.cohomology(n + 1)
    faces_L = L.faces(n)
    faces_K = K.faces(n)
    restrict = IntMatrix.from_rows(_pullback_matrix({v: v for v in L.vertices}, faces_L, faces_K), len(faces_K))
    dK = coboundary_matrix(K, n)
    rel_faces = mKL.basis(n + 1)
    all_next = {f: i for i, f in enumerate(K.faces(n + 1))}
    rel_pos = [all_next[f] for f in rel_faces]
    cL, cK = len(faces_L), len(faces_K)
    cols = []
    for rep in hL.reps:
        out = []
        for b in range(len(G.moduli)):
            part = rep[b * cL:(b + 1) * cL]
            lifted = solve_integer(restrict, part)
            if lifted is None:
                raise ArithmeticError("restriction to a subcomplex must be surjective")
            d = dK @ lifted[0]
            out.extend(d[i] for i in rel_pos)
        cols.append(hKL.coords(out))
    return AbHom(hL.group, hKL.group, IntMatrix.from_columns(cols, hKL.group.ngens))


def les_of_pair(pair: SimplicialPair, G: CoefficientGroup = Z, max_degree: int = 2) -> list[AbHom]:
    """Maps of the long exact sequence, in order, from H^0(K,L) to H^max_degree(L).

    For each degree n the list holds j: H^n(K,L) -> H^n(K),
    i: H^n(K) -> H^n(L) and, below max_degree, the connecting map
    H^n(L) -> H^{n+1}(K,L).
    """
    K, L = pair.complex, pair.sub
    mK, mL, mKL = _model(K, None, G), _model(L, None, G), _model(K, L, G)
    ident = {v: v for v in K.vertices}
    maps = []
    for n in range(max_degree + 1):
        maps.append(_hom_on_cohomology(mK, mKL, n, ident))
        maps.append(_hom_on_cohomology(mL, mK, n, ident))
        if n < max_degree:
            maps.append(connecting_map(pair, n, G))
    return maps


def les_is_exact(maps: Sequence[AbHom]) -> bool:
    """Exact at every interior node, and the first map is injective."""
    if maps and not maps[0].is_injective():
        return False
    return all(is_exact_at(f, g) for f, g in zip(maps, maps[1:]))


# ---------------------------------------------------------------------------
# constructions


def barycentric_subdivision(K: SimplicialComplex) -> tuple[SimplicialComplex, SimplicialMapData]:
    """Subdivision of K and the selection map picking each face's minimum vertex.

    New vertex labels number the nonempty faces of K ordered by dimension,
    then lexicographically.
    """
    faces = K.all_faces()
    label = {f: i for i, f in enumerate(faces)}
    facets = []
    for F in K.facets:
        for perm in permutations(F):
            chain = [label[tuple(sorted(perm[:k]))] for k in range(1, len(F) + 1)]
            facets.append(tuple(chain))
    sd = SimplicialComplex(tuple(range(len(faces))), tuple(facets))
    select = SimplicialMapData(sd, K, {label[f]: min(f) for f in faces})
    return sd, select


def star_cover(K: SimplicialComplex) -> CoverData:
    """One piece per vertex: its open star."""
    return CoverData(K, tuple((v, (v,)) for v in K.vertices))


def nerve(cover: CoverData) -> SimplicialComplex:
    """Subfamilies of pieces with a common point.

    Unions of open stars over vertex sets S_0..S_k meet iff some face of the
    base meets every S_i, so it suffices to test facets.
    """
    families = set()
    for F in cover.base.facets:
        fs = set(F)
        families.add(tuple(sorted(lbl for lbl, vs in cover.pieces if fs & set(vs))))
    labels = tuple(lbl for lbl, _ in cover.pieces)
    return SimplicialComplex(labels, tuple(families))


def _cylinder_facets(f: SimplicialMapData, top: Mapping[int, int], bottom: Mapping[int, int]) -> list[Face]:
    out = []
    for sigma in f.source.facets:
        for i in range(len(sigma)):
            out.append(tuple(top[v] for v in sigma[:i + 1]) + tuple(bottom[f(v)] for v in sigma[i:]))
    return out


def mapping_cylinder(f: SimplicialMapData) -> tuple[SimplicialComplex, SimplicialMapData, SimplicialMapData]:
    """Triangulated mapping cylinder with inclusions of source (top) and target (bottom).

    Source vertices are relabeled 0..a-1 and target vertices a..a+b-1, both
    in sorted order.  Each source facet v_0 < ... < v_k contributes the
    (possibly collapsed) prism simplices {v_0..v_i} + f({v_i..v_k}).
    """
    a = len(f.source.vertices)
    top = {v: i for i, v in enumerate(f.source.vertices)}
    bottom = {w: a + j for j, w in enumerate(f.target.vertices)}
    facets = _cylinder_facets(f, top, bottom)
    facets += [tuple(bottom[w] for w in t) for t in f.target.facets]
    M = SimplicialComplex(tuple(range(a + len(f.target.vertices))), tuple(facets))
    return M, SimplicialMapData(f.source, M, top), SimplicialMapData(f.target, M, bottom)


# ---------------------------------------------------------------------------
# standard examples


def simplex(d: int) -> SimplicialComplex:
    return SimplicialComplex.from_facets([tuple(range(d + 1))])


def sphere_boundary(d: int) -> SimplicialComplex:
    """Boundary of the (d+1)-simplex, a triangulated d-sphere."""
    return SimplicialComplex.from_facets(combinations(range(d + 2), d + 1))


def torus7() -> SimplicialComplex:
    """Minimal 7-vertex triangulation of the 2-torus."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex.from_facets(facets)


def circle(m: int) -> SimplicialComplex:
    """The m-gon, m >= 3."""
    if m < 3:
        raise ValueError("a simplicial circle needs at least 3 vertices")
    return SimplicialComplex.from_facets([(i, (i + 1) % m) for i in range(m)])


def wrap_map(m: int, k: int) -> SimplicialMapData:
    """Degree-k wrapping of the (k*m)-gon onto the m-gon, i -> i mod m."""
    return SimplicialMapData(circle(k * m), circle(m), {i: i % m for i in range(k * m)})


def suspension(K: SimplicialComplex) -> SimplicialComplex:
    """Join with two new apex vertices labeled after the existing ones."""
    top = max(K.vertices, default=-1)
    north, south = top + 1, top + 2
    facets = [f + (north,) for f in K.facets] + [f + (south,) for f in K.facets]
    return SimplicialComplex(K.vertices + (north, south), tuple(facets))


def suspend_map(f: SimplicialMapData) -> SimplicialMapData:
    S, T = suspension(f.source), suspension(f.target)
    sn, ss = max(f.source.vertices) + 1, max(f.source.vertices) + 2
    tn, ts = max(f.target.vertices) + 1, max(f.target.vertices) + 2
    vm = dict(f.vertex_map)
    vm[sn], vm[ss] = tn, ts
    return SimplicialMapData(S, T, vm)
