"""Exact dense linear algebra over GF(p).

Matrices hold plain ``int`` residues.  Subspaces are kept in a canonical
form (basis vectors in reduced echelon form, pivots increasing) so that
equality of subspaces is equality of representations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .field import FieldScalar, FieldSpec

Vector = tuple  # tuple[int, ...]


class DimensionError(ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class CompatibilityError(ValueError):
    """A basis is not compatible with a flag it was required to match."""


# ---------------------------------------------------------------------------
# elimination kernels on lists of rows


def _rref(rows: list[list[int]], ncols: int, p: int, ops: list[list[int]] | None = None):
    """Reduce ``rows`` in place to reduced row echelon form.

    If ``ops`` is given (one row per row of ``rows``) the same row operations
    are applied to it.  Returns the list of pivot columns; the first
    ``len(pivots)`` rows are the nonzero ones.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        k = r
        while k < nrows and rows[k][c] == 0:
            k += 1
        if k == nrows:
            continue
        if k != r:
            rows[k], rows[r] = rows[r], rows[k]
            if ops is not None:
                ops[k], ops[r] = ops[r], ops[k]
        prow = rows[r]
        a = prow[c]
        if a != 1:
            ainv = pow(a, -1, p)
            prow = rows[r] = [x * ainv % p for x in prow]
            if ops is not None:
                ops[r] = [x * ainv % p for x in ops[r]]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    rows[i] = [(x - f * y) % p for x, y in zip(ri, prow)]
                    if ops is not None:
                        ops[i] = [(x - f * y) % p for x, y in zip(ops[i], ops[r])]
        pivots.append(c)
        r += 1
    return pivots


def _null_space_rows(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : rows . x = 0}, one vector per free column."""
    work = [list(r) for r in rows]
    pivots = _rref(work, ncols, p)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-work[i][free]) % p
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    """Dense ``rows x cols`` matrix over GF(p), stored row-major."""

    rows: int
    cols: int
    p: int
    data: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise DimensionError(f"data does not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, cols: int | None = None) -> Matrix:
        rows = [tuple(int(x) % p for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, p, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], p: int, rows: int) -> Matrix:
        data = tuple(tuple(c[i] % p for c in columns) for i in range(rows))
        return cls(rows, len(columns), p, data)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> Matrix:
        return cls(rows, cols, p, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int, p: int) -> Matrix:
        return cls(n, n, p, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def random(cls, rows: int, cols: int, p: int, rng: random.Random) -> Matrix:
        return cls(rows, cols, p, tuple(tuple(rng.randrange(p) for _ in range(cols))
                                        for _ in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def field(self) -> FieldSpec:
        return FieldSpec(self.p)

    def entry(self, i: int, j: int) -> FieldScalar:
        return FieldScalar(self.data[i][j], FieldSpec(self.p))

    def columns(self) -> list[Vector]:
        return [tuple(r[j] for r in self.data) for j in range(self.cols)]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        p = self.p
        return tuple(sum(a * b for a, b in zip(r, v)) % p for r in self.data)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        p = self.p
        ocols = other.columns()
        data = tuple(tuple(sum(a * b for a, b in zip(r, c)) % p for c in ocols) for r in self.data)
        return Matrix(self.rows, other.cols, p, data)

    def transpose(self) -> Matrix:
        return Matrix(self.cols, self.rows, self.p, tuple(self.columns()))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.data)
        return f"Matrix({self.rows}x{self.cols} mod {self.p}: [{body}])"


def column_reduce(m: Matrix) -> tuple[Matrix, int, Matrix]:
    """Column echelon form: returns ``(reduced, rank, transform)`` with
    ``reduced == m @ transform`` and ``transform`` invertible."""
    p = m.p
    work = [list(c) for c in m.columns()]
    ops = [[int(i == j) for j in range(m.cols)] for i in range(m.cols)]
    pivots = _rref(work, m.rows, p, ops)
    reduced = Matrix.from_columns(work, p, m.rows) if m.cols else Matrix.zeros(m.rows, 0, p)
    # ops @ m^T == work^T, hence m @ ops^T == reduced
    transform = Matrix.from_rows(ops, p, m.cols).transpose() if m.cols else Matrix.zeros(0, 0, p)
    return reduced, len(pivots), transform


def rank(m: Matrix) -> int:
    work = [list(r) for r in m.data]
    return len(_rref(work, m.cols, m.p))


def solve(m: Matrix, b: Sequence[int], rng: random.Random | None = None) -> Vector | None:
    """One solution of ``m x = b``, or ``None`` if the system is infeasible.

    With ``rng`` a uniformly random element of the solution set is returned.
    """
    p = m.p
    if len(b) != m.rows:
        raise DimensionError("right-hand side length does not match matrix rows")
    work = [list(r) + [b[i] % p] for i, r in enumerate(m.data)]
    pivots = _rref(work, m.cols + 1, p)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [0] * m.cols
    if rng is not None:
        pivset = set(pivots)
        for j in range(m.cols):
            if j not in pivset:
                x[j] = rng.randrange(p)
    for i, pc in enumerate(pivots):
        row = work[i]
        x[pc] = (row[m.cols] - sum(row[j] * x[j] for j in range(pc + 1, m.cols))) % p
    return tuple(x)


def solve_matrix(m: Matrix, rhs: Matrix) -> Matrix:
    """The unique ``x`` with ``m @ x == rhs`` when ``m`` has full column rank."""
    if m.rows != rhs.rows:
        raise DimensionError("row counts differ")
    cols = []
    for c in rhs.columns():
        x = solve(m, c)
        if x is None:
            raise ValueError("right-hand side is not in the column space")
        cols.append(x)
    if not cols:
        return Matrix.zeros(m.cols, 0, m.p)
    return Matrix.from_columns(cols, m.p, m.cols)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise DimensionError("only square matrices are invertible")
    p = m.p
    work = [list(r) for r in m.data]
    ops = [[int(i == j) for j in range(m.rows)] for i in range(m.rows)]
    if len(_rref(work, m.cols, p, ops)) != m.rows:
        raise ZeroDivisionError("matrix is singular")
    return Matrix.from_rows(ops, p, m.rows)


def transpose_map(m: Matrix) -> Matrix:
    """The transpose, i.e. the dual map written in dual standard bases."""
    return m.transpose()


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of GF(p)^ambient_dim in canonical form.

    ``vectors`` are the basis vectors in reduced echelon form: their pivots
    (first nonzero coordinate) strictly increase, each pivot entry is 1, and
    every other basis vector vanishes at that coordinate.
    """

    ambient_dim: int
    p: int
    vectors: tuple = ()
    pivots: tuple = field(default=(), compare=False)

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ambient_dim: int, p: int) -> Subspace:
        rows = [[x % p for x in v] for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionError(f"vector of length {len(r)} in ambient dimension {ambient_dim}")
        pivots = _rref(rows, ambient_dim, p)
        return cls(ambient_dim, p, tuple(tuple(r) for r in rows[:len(pivots)]), tuple(pivots))

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> Subspace:
        return cls(ambient_dim, p, (), ())

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> Subspace:
        vecs = tuple(tuple(int(i == j) for j in range(ambient_dim)) for i in range(ambient_dim))
        return cls(ambient_dim, p, vecs, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def basis(self) -> Matrix:
        """The basis as the columns of an ``ambient_dim x dim`` matrix."""
        return Matrix.from_columns(self.vectors, self.p, self.ambient_dim)

    def contains(self, v: Sequence[int]) -> bool:
        p = self.p
        w = [x % p for x in v]
        for vec, pc in zip(self.vectors, self.pivots):
            f = w[pc]
            if f:
                w = [(x - f * y) % p for x, y in zip(w, vec)]
        return not any(w)

    def __le__(self, other: Subspace) -> bool:
        _check_same(self, other)
        return self.dim <= other.dim and all(other.contains(v) for v in self.vectors)

    def __lt__(self, other: Subspace) -> bool:
        return self.dim < other.dim and self <= other

    def random_vector(self, rng: random.Random) -> Vector:
        p = self.p
        out = [0] * self.ambient_dim
        for vec in self.vectors:
            c = rng.randrange(p)
            if c:
                out = [(x + c * y) % p for x, y in zip(out, vec)]
        return tuple(out)


def _check_same(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim or a.p != b.p:
        raise DimensionError(
            f"subspaces live in different spaces ({a.ambient_dim} mod {a.p} vs {b.ambient_dim} mod {b.p})")


def image(m: Matrix) -> Subspace:
    return Subspace.span(m.columns(), m.rows, m.p)


def kernel(m: Matrix) -> Subspace:
    return Subspace.span(_null_space_rows([list(r) for r in m.data], m.cols, m.p), m.cols, m.p)


def perp(s: Subspace) -> Subspace:
    """Annihilator of ``s``; dual coordinates are taken in the dual standard basis."""
    return Subspace.span(_null_space_rows([list(v) for v in s.vectors], s.ambient_dim, s.p),
                         s.ambient_dim, s.p)


def sum_(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.span(a.vectors + b.vectors, a.ambient_dim, a.p)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    rows = [list(v) for v in perp(a).vectors] + [list(v) for v in perp(b).vectors]
    out = Subspace.span(_null_space_rows(rows, a.ambient_dim, a.p), a.ambient_dim, a.p)
    if __debug__:
        assert a.dim + b.dim == sum_(a, b).dim + out.dim
    return out


def preimage(m: Matrix, s: Subspace) -> Subspace:
    """``{v : m v in s}``."""
    if s.ambient_dim != m.rows or s.p != m.p:
        raise DimensionError(f"subspace of dim {s.ambient_dim} is not in the codomain of a {m.shape} map")
    p = m.p
    ann = perp(s).vectors
    # rows of (ann @ m)
    mcols = m.columns()
    rows = [[sum(a * b for a, b in zip(alpha, c)) % p for c in mcols] for alpha in ann]
    return Subspace.span(_null_space_rows(rows, m.cols, p), m.cols, p)


def push(m: Matrix, s: Subspace) -> Subspace:
    """Image of the subspace ``s`` under ``m``."""
    if s.ambient_dim != m.cols:
        raise DimensionError("subspace is not in the domain")
    return Subspace.span([m.apply(v) for v in s.vectors], m.rows, m.p)


# ---------------------------------------------------------------------------
# flags and compatible bases


@dataclass(frozen=True)
class Flag:
    """A strictly increasing chain of subspaces of one space."""

    ambient_dim: int
    p: int
    spaces: tuple

    def __post_init__(self):
        for a, b in zip(self.spaces, self.spaces[1:]):
            if not a < b:
                raise ValueError("flag spaces must be strictly increasing")
        for s in self.spaces:
            if s.ambient_dim != self.ambient_dim or s.p != self.p:
                raise DimensionError("flag space in the wrong ambient space")

    @classmethod
    def from_chain(cls, spaces: Iterable[Subspace], ambient_dim: int, p: int) -> Flag:
        """Sort a chain of subspaces by dimension and drop repeats."""
        uniq = {}
        for s in spaces:
            uniq.setdefault(s.dim, s)
            if uniq[s.dim] != s:
                raise ValueError("subspaces do not form a chain")
        return cls(ambient_dim, p, tuple(uniq[d] for d in sorted(uniq)))

    def is_complete(self) -> bool:
        return [s.dim for s in self.spaces] == list(range(self.ambient_dim + 1))

    def __iter__(self):
        return iter(self.spaces)

    def __len__(self):
        return len(self.spaces)


@dataclass(frozen=True)
class BasisWithLabels:
    ambient_dim: int
    p: int
    vectors: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.vectors) != len(self.labels):
            raise ValueError("one label per vector required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")

    @property
    def matrix(self) -> Matrix:
        return Matrix.from_columns(self.vectors, self.p, self.ambient_dim)

    def is_basis(self) -> bool:
        return len(self.vectors) == self.ambient_dim and \
            Subspace.span(self.vectors, self.ambient_dim, self.p).dim == self.ambient_dim

    def vector(self, label: Hashable) -> Vector:
        return self.vectors[self.labels.index(label)]

    def dual(self) -> BasisWithLabels:
        """The dual basis, written in the dual standard basis, same labels."""
        inv = inverse(self.matrix)
        return BasisWithLabels(self.ambient_dim, self.p, tuple(tuple(r) for r in inv.data), self.labels)

    def without(self, label: Hashable) -> list:
        return [v for v, lab in zip(self.vectors, self.labels) if lab != label]


def is_compatible(basis: BasisWithLabels, flag: Flag) -> bool:
    """True iff, for every space F of the flag, the basis vectors lying in F span F."""
    if not basis.is_basis():
        return False
    for s in flag:
        if sum(1 for v in basis.vectors if s.contains(v)) != s.dim:
            return False
    return True


def _standard(i: int, n: int) -> Vector:
    return tuple(int(j == i) for j in range(n))


def complete_flag(f: Flag) -> Flag:
    """Refine ``f`` to a complete flag, adding standard basis vectors greedily."""
    n, p = f.ambient_dim, f.p
    chain = list(f.spaces)
    if not chain or chain[0].dim != 0:
        chain.insert(0, Subspace.zero(n, p))
    if chain[-1].dim != n:
        chain.append(Subspace.full(n, p))
    out = [chain[0]]
    for target in chain[1:]:
        cur = out[-1]
        while cur.dim < target.dim - 1:
            # first reduced basis vector of the target missing from cur
            extra = next(v for v in target.vectors if not cur.contains(v))
            cur = Subspace.span(cur.vectors + (extra,), n, p)
            out.append(cur)
        out.append(target)
    return Flag(n, p, tuple(out))


def common_basis(f: Flag, g: Flag, rng: random.Random | None = None) -> BasisWithLabels:
    """A basis compatible with both flags, by induction on the length of the first flag.

    Labels are the integers ``0..n-1`` in the order the vectors are produced.
    With ``rng`` the free choice of the new vector at each step is randomized.
    """
    if f.ambient_dim != g.ambient_dim or f.p != g.p:
        raise DimensionError("flags live in different spaces")
    n, p = f.ambient_dim, f.p
    fs = list(complete_flag(f).spaces)
    gs = list(complete_flag(g).spaces)
    vectors = _common_basis_rec(fs, gs, n, p, rng)
    return BasisWithLabels(n, p, tuple(vectors), tuple(range(len(vectors))))


def _common_basis_rec(fs: list, gs: list, n: int, p: int, rng) -> list:
    # fs, gs: complete flags of the same top space, fs[i].dim == gs[i].dim == i
    k = len(fs) - 1
    if k == 0:
        return []
    top = fs[k - 1]
    s = max(i for i in range(k) if gs[i] <= top)
    g_next = []
    for i in range(k):
        g_next.append(gs[i] if i <= s else intersect(gs[i + 1], top))
    basis = _common_basis_rec(fs[:k], g_next, n, p, rng)
    target = gs[s + 1]
    if rng is None:
        e = next(v for v in target.vectors if not top.contains(v))
    else:
        while True:
            e = target.random_vector(rng)
            if not top.contains(e):
                break
    basis.append(e)
    return basis
