"""Exact integer linear algebra.

Smith and Hermite normal forms, integer solving, sublattices of Z^n and
finitely generated abelian groups in invariant-factor form.  Everything is
done with Python integers; there are no modular shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

Vector = tuple[int, ...]


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        cols = [list(c) for c in columns]
        for c in cols:
            if len(c) != rows:
                raise ValueError("column length mismatch")
        return cls(rows, len(cols), tuple(cols[j][i] for i in range(rows) for j in range(len(cols))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            out[i][i] = d
        return cls.from_rows(out, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
            return IntMatrix.from_rows(_matmul(self.to_rows(), other.to_rows(), other.cols), other.cols)
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.rows))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix.from_rows([list(self.row(i)) + list(other.row(i)) for i in range(self.rows)],
                                   self.cols + other.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.to_rows())

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})"


def _matmul(a: list[list[int]], b: list[list[int]], bcols: int) -> list[list[int]]:
    out = []
    for row in a:
        acc = [0] * bcols
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(bcols):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with U, V unimodular and S diagonal.

    The inverses of U and V are carried along because most callers need
    them and they cost the same elementary operations.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix = field(repr=False)
    V_inv: IntMatrix = field(repr=False)

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(min(self.S.rows, self.S.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


class _SmithWork:
    """Mutable state for one Smith reduction."""

    def __init__(self, a: list[list[int]], m: int, n: int, transforms: bool):
        self.a = a
        self.m, self.n = m, n
        self.tf = transforms
        if transforms:
            self.U = [[int(i == j) for j in range(m)] for i in range(m)]
            self.Ui = [[int(i == j) for j in range(m)] for i in range(m)]
            self.V = [[int(i == j) for j in range(n)] for i in range(n)]
            self.Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    # row i -= q * row t
    def row_sub(self, i, t, q):
        a = self.a
        ri, rt = a[i], a[t]
        for j in range(len(rt)):
            if rt[j]:
                ri[j] -= q * rt[j]
        if self.tf:
            ui, ut = self.U[i], self.U[t]
            for j in range(self.m):
                if ut[j]:
                    ui[j] -= q * ut[j]
            for row in self.Ui:
                if row[i]:
                    row[t] += q * row[i]

    # col j -= q * col t
    def col_sub(self, j, t, q):
        for row in self.a:
            if row[t]:
                row[j] -= q * row[t]
        if self.tf:
            for row in self.V:
                if row[t]:
                    row[j] -= q * row[t]
            vt, vj = self.Vi[t], self.Vi[j]
            for k in range(self.n):
                if vj[k]:
                    vt[k] += q * vj[k]

    def row_swap(self, i, t):
        if i == t:
            return
        a = self.a
        a[i], a[t] = a[t], a[i]
        if self.tf:
            self.U[i], self.U[t] = self.U[t], self.U[i]
            for row in self.Ui:
                row[i], row[t] = row[t], row[i]

    def col_swap(self, j, t):
        if j == t:
            return
        for row in self.a:
            row[j], row[t] = row[t], row[j]
        if self.tf:
            for row in self.V:
                row[j], row[t] = row[t], row[j]
            self.Vi[j], self.Vi[t] = self.Vi[t], self.Vi[j]

    def row_negate(self, t):
        self.a[t] = [-x for x in self.a[t]]
        if self.tf:
            self.U[t] = [-x for x in self.U[t]]
            for row in self.Ui:
                row[t] = -row[t]


def _find_pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x:
                ax = abs(x)
                if ax == 1:
                    return i, j
                if best is None or ax < best[0]:
                    best = (ax, i, j)
    return None if best is None else best[1:]


def _smith(a: list[list[int]], m: int, n: int, transforms: bool) -> _SmithWork:
    w = _SmithWork(a, m, n, transforms)
    t = 0
    while t < min(m, n):
        piv = _find_pivot(a, t, m, n)
        if piv is None:
            break
        w.row_swap(piv[0], t)
        w.col_swap(piv[1], t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    w.row_sub(i, t, a[i][t] // p)
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    w.col_sub(j, t, a[t][j] // p)
                    dirty = dirty or a[t][j] != 0
            if dirty:
                # smallest remainder in row/column t becomes the new pivot
                best = None
                for i in range(t + 1, m):
                    x = abs(a[i][t])
                    if x and (best is None or x < best[0]):
                        best = (x, i, None)
                for j in range(t + 1, n):
                    x = abs(a[t][j])
                    if x and (best is None or x < best[0]):
                        best = (x, None, j)
                if best[1] is not None:
                    w.row_swap(best[1], t)
                else:
                    w.col_swap(best[2], t)
                continue
            bad = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row into row t and reduce again
            w.row_sub(t, bad, -1)
        if a[t][t] < 0:
            w.row_negate(t)
        t += 1
    return w


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with deterministic pivoting.

    At each diagonal position the pivot is the entry of smallest absolute
    value in the remaining block, ties broken by lowest row then column.
    """
    m, n = A.rows, A.cols
    w = _smith(A.to_rows(), m, n, True)
    return SmithDecomposition(
        U=IntMatrix.from_rows(w.U, m),
        S=IntMatrix.from_rows(w.a, n),
        V=IntMatrix.from_rows(w.V, n),
        U_inv=IntMatrix.from_rows(w.Ui, m),
        V_inv=IntMatrix.from_rows(w.Vi, n),
    )


def smith_diagonal(A: IntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith form, without computing transforms."""
    w = _smith(A.to_rows(), A.rows, A.cols, False)
    return tuple(w.a[i][i] for i in range(min(A.rows, A.cols)))


def rank(A: IntMatrix) -> int:
    return sum(1 for d in smith_diagonal(A) if d)


# ---------------------------------------------------------------------------
# Hermite normal form and lattices


def hnf_rows(vectors: Iterable[Sequence[int]], dim: int) -> list[list[int]]:
    """Row-style Hermite basis of the span of ``vectors``.

    Rows are in echelon form with positive pivots; entries above a pivot are
    reduced into ``[0, pivot)``.  The result is canonical for the lattice.
    """
    rows = [list(v) for v in vectors if any(v)]
    for r in rows:
        if len(r) != dim:
            raise ValueError("vector length mismatch")
    basis: list[list[int]] = []
    col = 0
    while rows and col < dim:
        active = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        if not active:
            col += 1
            continue
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        piv = active[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rows = rest
        col += 1
    # reduce above pivots
    for k, b in enumerate(basis):
        pc = _pivot_col(b)
        p = b[pc]
        for i in range(k):
            q = basis[i][pc] // p
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], b)]
    return basis


def _pivot_col(row: Sequence[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    raise ValueError("zero row has no pivot")


def echelon_coords(basis: list[list[int]], v: Sequence[int]) -> Optional[list[int]]:
    """Integer coordinates of ``v`` in an echelon basis, or None if ``v`` is outside."""
    v = list(v)
    coords = []
    for b in basis:
        pc = _pivot_col(b)
        q, r = divmod(v[pc], b[pc])
        if r:
            return None
        coords.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, b)]
    if any(v):
        return None
    return coords


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^ambient_dim, basis columns in Hermite normal form."""

    ambient_dim: int
    basis: IntMatrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ambient_dim: int) -> "Lattice":
        rows = hnf_rows(vectors, ambient_dim)
        return cls(ambient_dim, IntMatrix.from_columns(rows, ambient_dim))

    @classmethod
    def full(cls, n: int) -> "Lattice":
        return cls.span([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zero(cls, n: int) -> "Lattice":
        return cls(n, IntMatrix.zeros(n, 0))

    @property
    def rank(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[Vector]:
        return self.basis.columns()

    def coords(self, v: Sequence[int]) -> Optional[list[int]]:
        return echelon_coords([list(c) for c in self.vectors()], v)

    def __contains__(self, v) -> bool:
        return self.coords(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(v in self for v in other.vectors())

    def __str__(self):
        return f"Lattice(dim={self.ambient_dim}, basis={[list(v) for v in self.vectors()]})"


def image(A: IntMatrix) -> Lattice:
    """Column span of ``A``."""
    return Lattice.span(A.columns(), A.rows)


def kernel(A: IntMatrix) -> Lattice:
    """Integer kernel of ``A`` as a canonical lattice in Z^cols."""
    sd = smith_normal_form(A)
    r = sd.rank
    return Lattice.span([sd.V.col(j) for j in range(r, A.cols)], A.cols)


def _check_dims(a: Lattice, b: Lattice):
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    _check_dims(a, b)
    return Lattice.span(a.vectors() + b.vectors(), a.ambient_dim)


def intersection(a: Lattice, b: Lattice) -> Lattice:
    _check_dims(a, b)
    n = a.ambient_dim
    if a.rank == 0 or b.rank == 0:
        return Lattice.zero(n)
    # a x = b y  <=>  [A | -B] (x, y) = 0
    stacked = a.basis.hstack(-b.basis)
    ker = kernel(stacked)
    return Lattice.span([a.basis @ v[:a.rank] for v in ker.vectors()], n)


def preimage(A: IntMatrix, target: Lattice) -> Lattice:
    """``{x in Z^cols : A x in target}``."""
    if A.rows != target.ambient_dim:
        raise ValueError("dimension mismatch")
    n = A.cols
    if target.rank == 0:
        return kernel(A)
    ker = kernel(A.hstack(-target.basis))
    return Lattice.span([v[:n] for v in ker.vectors()], n)


def saturation(a: Lattice) -> Lattice:
    """``(a tensor Q) cap Z^n``."""
    n = a.ambient_dim
    if a.rank == 0:
        return Lattice.zero(n)
    ann = kernel(a.basis.T)
    if ann.rank == 0:
        return Lattice.full(n)
    return kernel(ann.basis.T)


def index_in(big: Lattice, small: Lattice) -> Optional[int]:
    """The index [big : small]; None when it is infinite.

    Raises ValueError if ``small`` is not contained in ``big``.
    """
    _check_dims(big, small)
    coords = []
    for v in small.vectors():
        c = big.coords(v)
        if c is None:
            raise ValueError("index_in: second lattice is not a sublattice of the first")
        coords.append(c)
    if small.rank < big.rank:
        return None
    if big.rank == 0:
        return 1
    return abs(IntMatrix.from_columns(coords, big.rank).det())


def lattice_ops(op: str, a: Lattice, b: Optional[Lattice] = None):
    """Dispatch by name: image, intersection, sum, saturation, index_in."""
    if op == "intersection":
        return intersection(a, b)
    if op == "sum":
        return lattice_sum(a, b)
    if op == "saturation":
        return saturation(a)
    if op == "index_in":
        return index_in(a, b)
    if op == "image":
        return image(a.basis)
    raise ValueError(f"unknown lattice operation {op!r}")


# ---------------------------------------------------------------------------
# solving


def solve_integer(A: IntMatrix, b: Sequence[int]) -> Optional[tuple[Vector, Lattice]]:
    """Integer solution of ``A x = b`` and the integer kernel of ``A``.

    Returns None when there is no integer solution.  The particular solution
    is the canonical coset representative: reducing against the Hermite
    basis of the kernel, each kernel pivot coordinate lies in [0, pivot).
    """
    b = list(b)
    if len(b) != A.rows:
        raise ValueError("right-hand side has wrong length")
    sd = smith_normal_form(A)
    c = sd.U @ b
    diag = sd.diagonal
    y = [0] * A.cols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci:
                return None
        else:
            q, r = divmod(ci, d)
            if r:
                return None
            y[i] = q
    x = list(sd.V @ y)
    ker = Lattice.span([sd.V.col(j) for j in range(sd.rank, A.cols)], A.cols)
    for v in ker.vectors():
        pc = _pivot_col(v)
        q = x[pc] // v[pc]
        if q:
            x = [xi - q * vi for xi, vi in zip(x, v)]
    return tuple(x), ker


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True, order=True)
class FgAbGroup:
    """Z^free_rank + Z/d_1 + ... + Z/d_k with d_1 | d_2 | ... and d_i >= 2.

    Generators are ordered torsion first (in invariant-factor order), then
    free.  ``orders`` lists the order of each generator, 0 meaning infinite.
    """

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(self.invariant_factors))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        prev = None
        for d in self.invariant_factors:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
            if prev is not None and d % prev:
                raise ValueError(f"invariant factors {self.invariant_factors} do not form a divisibility chain")
            prev = d

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FgAbGroup":
        """Canonical form of a direct sum of cyclic groups (0 = infinite cyclic)."""
        orders = list(orders)
        return cokernel(IntMatrix.diagonal(orders))

    @classmethod
    def free(cls, r: int) -> "FgAbGroup":
        return cls(r, ())

    @property
    def orders(self) -> tuple[int, ...]:
        return self.invariant_factors + (0,) * self.free_rank

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def torsion_count(self) -> int:
        return len(self.invariant_factors)

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def relation_matrix(self) -> IntMatrix:
        return IntMatrix.diagonal(self.orders)

    def relation_lattice(self) -> Lattice:
        return Lattice.span([[d if i == j else 0 for i in range(self.ngens)]
                             for j, d in enumerate(self.orders) if d], self.ngens)

    def reduce(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ngens:
            raise ValueError(f"element {tuple(v)} does not belong to {self}")
        return tuple(x % d if d else x for x, d in zip(v, self.orders))

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_orders(self.orders + other.orders)

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, obj) -> "FgAbGroup":
        if isinstance(obj, str):
            return parse_group(obj)
        return cls(int(obj.get("free_rank", 0)), tuple(int(d) for d in obj.get("invariant_factors", ())))


def parse_group(text: str) -> FgAbGroup:
    """Parse ``"Z^2 + Z/2 + Z/6"`` style strings ("0" for the trivial group)."""
    text = text.strip()
    if text in ("0", ""):
        return FgAbGroup()
    orders = []
    for part in text.split("+"):
        part = part.strip()
        if part.startswith("Z/"):
            orders.append(int(part[2:]))
        elif part == "Z":
            orders.append(0)
        elif part.startswith("Z^"):
            orders.extend([0] * int(part[2:]))
        else:
            raise ValueError(f"cannot parse group summand {part!r}")
    return FgAbGroup.from_orders(orders)


def cokernel(A: IntMatrix) -> FgAbGroup:
    """Z^rows / (column span of A) in canonical form."""
    diag = smith_diagonal(A)
    r = sum(1 for d in diag if d)
    factors = tuple(sorted(abs(d) for d in diag if abs(d) > 1))
    return FgAbGroup(A.rows - r, factors)


@dataclass(frozen=True)
class AbHom:
    """Homomorphism between groups given on canonical generators.

    Column j is the image of source generator j, in target coordinates.
    Construction checks that relations of the source map to relations of
    the target, then reduces entries modulo the target orders.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        M = self.matrix
        if M.rows != self.target.ngens or M.cols != self.source.ngens:
            raise ValueError(
                f"matrix shape {M.rows}x{M.cols} does not fit {self.source} -> {self.target}")
        t_orders = self.target.orders
        for j, d in enumerate(self.source.orders):
            if d == 0:
                continue
            for i, e in enumerate(t_orders):
                if (d * M[i, j]) % e if e else d * M[i, j]:
                    raise ValueError(f"not well defined: generator {j} has order {d} but its image does not")
        reduced = IntMatrix.from_rows(
            [[M[i, j] % e if e else M[i, j] for j in range(M.cols)] for i, e in enumerate(t_orders)],
            M.cols)
        object.__setattr__(self, "matrix", reduced)

    @classmethod
    def identity(cls, G: FgAbGroup) -> "AbHom":
        return cls(G, G, IntMatrix.identity(G.ngens))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "AbHom":
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens))

    def __call__(self, v: Sequence[int]) -> Vector:
        return self.target.reduce(self.matrix @ tuple(v))

    def compose(self, inner: "AbHom") -> "AbHom":
        """``self after inner``."""
        if inner.target != self.source:
            raise ValueError("composition of non-composable homomorphisms")
        return AbHom(inner.source, self.target, self.matrix @ inner.matrix)

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def kernel_lattice(self) -> Lattice:
        """Kernel as a lattice in Z^(source gens); contains the source relations."""
        return preimage(self.matrix, self.target.relation_lattice())

    def image_lattice(self) -> Lattice:
        """Image plus target relations, as a lattice in Z^(target gens)."""
        return lattice_sum(image(self.matrix), self.target.relation_lattice())

    def is_injective(self) -> bool:
        return self.kernel_lattice() == self.source.relation_lattice()

    def is_surjective(self) -> bool:
        return self.image_lattice() == Lattice.full(self.target.ngens)

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def image_group(self) -> FgAbGroup:
        return quotient(self.image_lattice(), self.target.relation_lattice()).group

    def kernel_group(self) -> FgAbGroup:
        return quotient(self.kernel_lattice(), self.source.relation_lattice()).group

    def to_json(self) -> dict:
        return {"source": str(self.source), "target": str(self.target), "matrix": self.matrix.to_rows()}


def is_exact_at(f: AbHom, g: AbHom) -> bool:
    """Exactness of ``A --f--> B --g--> C`` at B (image lattice = kernel lattice)."""
    if f.target != g.source:
        raise ValueError("maps do not meet")
    return f.image_lattice() == g.kernel_lattice()


# ---------------------------------------------------------------------------
# subquotients


@dataclass(frozen=True)
class Quotient:
    """L / R for lattices R within L, with chosen generator representatives.

    ``reps[i]`` is an ambient vector representing canonical generator i.
    """

    group: FgAbGroup
    reps: tuple[Vector, ...]
    _to_group: IntMatrix
    _basis: tuple[tuple[int, ...], ...]

    def coords(self, v: Sequence[int]) -> Vector:
        c = echelon_coords([list(b) for b in self._basis], v)
        if c is None:
            raise ValueError("vector does not lie in the numerator lattice")
        return self.group.reduce(self._to_group @ c) if self.group.ngens else ()


def quotient(L: Lattice, R: Lattice) -> Quotient:
    basis = [list(v) for v in L.vectors()]
    rel_coords = []
    for v in R.vectors():
        c = echelon_coords(basis, v)
        if c is None:
            raise ValueError("relation lattice is not contained in the numerator")
        rel_coords.append(c)
    k = len(basis)
    X = IntMatrix.from_columns(rel_coords, k) if rel_coords else IntMatrix.zeros(k, 0)
    return _quotient_from_relations(basis, X, L.ambient_dim)


def _quotient_from_relations(basis: list[Sequence[int]], X: IntMatrix, ambient: int) -> Quotient:
    """Quotient of span(basis) (a basis!) by the relations X given in basis coords."""
    k = len(basis)
    sd = smith_normal_form(X)
    diag = list(sd.diagonal) + [0] * (k - min(X.rows, X.cols))
    keep = [i for i in range(k) if abs(diag[i]) != 1]
    # torsion generators first, ordered as the diagonal, then free ones
    tors = [i for i in keep if diag[i] != 0]
    free = [i for i in keep if diag[i] == 0]
    order = tors + free
    group = FgAbGroup(len(free), tuple(abs(diag[i]) for i in tors))
    reps = []
    for i in order:
        c = sd.U_inv.col(i)
        reps.append(tuple(sum(c[j] * basis[j][t] for j in range(k)) for t in range(ambient)))
    to_group = sd.U.submatrix(order, range(k)) if order else IntMatrix.zeros(0, k)
    return Quotient(group, tuple(reps), to_group, tuple(tuple(b) for b in basis))
