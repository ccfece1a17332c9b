"""Persistence modules over finite zigzags.

A finite zigzag is an oriented A_n quiver.  Points are numbered ``1..n``
along the total order that runs through the zigzag; slot ``i`` (0-based)
joins point ``i+1`` and point ``i+2`` and is ``"F"`` when the arrow points
right and ``"B"`` when it points left.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import linalg
from .linalg import DimensionError, Matrix, Subspace

FORWARD = "F"
BACKWARD = "B"


class PreconditionError(ValueError):
    """An operation was called outside its precondition."""


@dataclass(frozen=True)
class ZigzagShape:
    directions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        bad = [d for d in self.directions if d not in (FORWARD, BACKWARD)]
        if bad:
            raise ValueError(f"directions must be 'F' or 'B', got {bad[0]!r}")

    @classmethod
    def from_string(cls, s: str) -> ZigzagShape:
        return cls(tuple(s))

    @classmethod
    def chain(cls, n_points: int) -> ZigzagShape:
        return cls((FORWARD,) * (n_points - 1))

    @property
    def n_points(self) -> int:
        return len(self.directions) + 1

    def __str__(self):
        return "".join(self.directions)

    def extrema(self) -> list[int]:
        """Endpoints plus every point where the arrow direction flips."""
        n = self.n_points
        out = [1]
        for i in range(1, len(self.directions)):
            if self.directions[i] != self.directions[i - 1]:
                out.append(i + 1)
        if n > 1:
            out.append(n)
        return out

    def is_chain(self) -> bool:
        return all(d == FORWARD for d in self.directions)

    def is_monotone(self) -> bool:
        return len(set(self.directions)) <= 1

    def sub(self, lo: int, hi: int) -> ZigzagShape:
        return ZigzagShape(self.directions[lo - 1:hi - 1])

    def reversed(self) -> ZigzagShape:
        """Same poset with the point numbering reversed."""
        flip = {FORWARD: BACKWARD, BACKWARD: FORWARD}
        return ZigzagShape(tuple(flip[d] for d in reversed(self.directions)))

    def opposite(self) -> ZigzagShape:
        """Opposite poset, renumbered so that it again reads left to right.

        Reversing the arrows and the numbering together leaves each arrow
        pointing the same way on the page, so only the sequence is reversed.
        """
        return ZigzagShape(tuple(reversed(self.directions)))

    def is_max_at_end(self) -> bool:
        """For a monotone shape: is the last point the maximum?"""
        return not self.directions or self.directions[0] == FORWARD


@dataclass(frozen=True, order=True)
class Interval:
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"invalid interval [{self.lo},{self.hi}]")

    def __contains__(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def __len__(self):
        return self.hi - self.lo + 1

    def points(self) -> range:
        return range(self.lo, self.hi + 1)

    def shift(self, offset: int) -> Interval:
        return Interval(self.lo + offset, self.hi + offset)

    def reflect(self, n_points: int) -> Interval:
        return Interval(n_points + 1 - self.hi, n_points + 1 - self.lo)

    def check(self, shape: ZigzagShape):
        if self.hi > shape.n_points:
            raise PreconditionError(f"interval {self} exceeds {shape.n_points} points")

    def __str__(self):
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class Barcode:
    """Multiset of intervals, stored as sorted ``(interval, multiplicity)`` pairs."""

    bars: tuple = ()

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> Barcode:
        return cls.from_counts(Counter(intervals))

    @classmethod
    def from_counts(cls, counts) -> Barcode:
        return cls(tuple(sorted((i, m) for i, m in dict(counts).items() if m > 0)))

    def counts(self) -> Counter:
        return Counter(dict(self.bars))

    def intervals(self) -> list[Interval]:
        return [i for i, m in self.bars for _ in range(m)]

    def reflect(self, n_points: int) -> Barcode:
        return Barcode.from_counts({i.reflect(n_points): m for i, m in self.bars})

    def dims(self, n_points: int) -> list[int]:
        out = [0] * n_points
        for i, m in self.bars:
            for x in i.points():
                out[x - 1] += m
        return out

    def __len__(self):
        return sum(m for _, m in self.bars)

    def __str__(self):
        return " ".join(f"{i}x{m}" if m > 1 else str(i) for i, m in self.bars) or "(empty)"


@dataclass(frozen=True)
class PersistenceModule:
    """A fiber dimension per point and one matrix per arrow.

    ``maps[i]`` goes from point ``i+1`` to point ``i+2`` when the arrow is
    forward, and the other way round when it is backward.
    """

    shape: ZigzagShape
    dims: tuple
    maps: tuple
    p: int

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.dims) != self.shape.n_points:
            raise DimensionError(f"{len(self.dims)} dims for {self.shape.n_points} points")
        if len(self.maps) != len(self.shape.directions):
            raise DimensionError(f"{len(self.maps)} maps for {len(self.shape.directions)} arrows")
        for i, (d, m) in enumerate(zip(self.shape.directions, self.maps)):
            src, tgt = self.arrow(i)
            if m.p != self.p:
                raise DimensionError(f"map {i} is over GF({m.p}), module over GF({self.p})")
            if m.shape != (self.dims[tgt - 1], self.dims[src - 1]):
                raise DimensionError(
                    f"map {i} has shape {m.rows}x{m.cols}, expected "
                    f"{self.dims[tgt - 1]}x{self.dims[src - 1]}")

    @property
    def n_points(self) -> int:
        return self.shape.n_points

    def dim(self, x: int) -> int:
        return self.dims[x - 1]

    def arrow(self, i: int) -> tuple[int, int]:
        """(source, target) points of arrow ``i``."""
        if self.shape.directions[i] == FORWARD:
            return i + 1, i + 2
        return i + 2, i + 1

    def is_zero(self) -> bool:
        return not any(self.dims)

    def total_dim(self) -> int:
        return sum(self.dims)

    def structure_map(self, x: int, y: int) -> Matrix:
        """The composed map ``V_x -> V_y`` for ``x <= y`` in a monotone stretch."""
        if x == y:
            return Matrix.identity(self.dim(x), self.p)
        lo, hi = min(x, y), max(x, y)
        dirs = set(self.shape.directions[lo - 1:hi - 1])
        want = FORWARD if x < y else BACKWARD
        if dirs != {want}:
            raise PreconditionError(f"point {x} is not below point {y}")
        m = Matrix.identity(self.dim(x), self.p)
        if x < y:
            for i in range(x - 1, y - 1):
                m = self.maps[i] @ m
        else:
            for i in range(x - 2, y - 2, -1):
                m = self.maps[i] @ m
        return m

    def __str__(self):
        return f"PersistenceModule(p={self.p}, dirs={self.shape or '-'}, dims={list(self.dims)})"


def _v(vector) -> tuple:
    return tuple(vector)


@dataclass(frozen=True)
class Summand:
    """An interval submodule given by one generator per point of its interval."""

    interval: Interval
    generators: tuple  # generators[k] lives at point interval.lo + k

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(_v(g) for g in self.generators))
        if len(self.generators) != len(self.interval):
            raise ValueError("one generator per point of the interval required")

    def at(self, x: int):
        if x not in self.interval:
            return None
        return self.generators[x - self.interval.lo]

    def shift(self, offset: int) -> Summand:
        return Summand(self.interval.shift(offset), self.generators)

    def reflect(self, n_points: int) -> Summand:
        return Summand(self.interval.reflect(n_points), tuple(reversed(self.generators)))

    def restrict(self, lo: int, hi: int) -> Summand | None:
        """Restriction to points ``lo..hi``, renumbered from 1 (``None`` if zero)."""
        a, b = max(lo, self.interval.lo), min(hi, self.interval.hi)
        if a > b:
            return None
        gens = self.generators[a - self.interval.lo:b - self.interval.lo + 1]
        return Summand(Interval(a - lo + 1, b - lo + 1), gens)

    def transform(self, bases: Sequence[Matrix]) -> Summand:
        """Rewrite generators through per-point coordinate matrices (``bases[x-1]``)."""
        return Summand(self.interval, tuple(bases[x - 1].apply(g)
                                            for x, g in zip(self.interval.points(), self.generators)))


@dataclass(frozen=True)
class Decomposition:
    module: PersistenceModule
    summands: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))

    def barcode(self) -> Barcode:
        return Barcode.from_intervals(s.interval for s in self.summands)

    def __len__(self):
        return len(self.summands)


# ---------------------------------------------------------------------------
# constructions


def zero_module(shape: ZigzagShape, p: int) -> PersistenceModule:
    maps = [Matrix.zeros(0, 0, p) for _ in shape.directions]
    return PersistenceModule(shape, (0,) * shape.n_points, maps, p)


def module_from_maps(shape: ZigzagShape, dims: Sequence[int], maps: Sequence, p: int) -> PersistenceModule:
    """Build a module from nested lists (or ``Matrix`` values) for each arrow."""
    mats = []
    for i, m in enumerate(maps):
        if isinstance(m, Matrix):
            mats.append(m)
            continue
        src, tgt = (i, i + 1) if shape.directions[i] == FORWARD else (i + 1, i)
        mats.append(Matrix.from_rows(m, p, dims[src]) if dims[tgt] else Matrix.zeros(0, dims[src], p))
    return PersistenceModule(shape, tuple(dims), tuple(mats), p)


def constant_module(shape: ZigzagShape, interval: Interval, p: int) -> PersistenceModule:
    """The module that is k on the interval, zero elsewhere, identities inside."""
    interval.check(shape)
    dims = [1 if x in interval else 0 for x in range(1, shape.n_points + 1)]
    maps = []
    for i, d in enumerate(shape.directions):
        src, tgt = (i + 1, i + 2) if d == FORWARD else (i + 2, i + 1)
        if src in interval and tgt in interval:
            maps.append(Matrix.identity(1, p))
        else:
            maps.append(Matrix.zeros(dims[tgt - 1], dims[src - 1], p))
    return PersistenceModule(shape, tuple(dims), tuple(maps), p)


def direct_sum(*modules: PersistenceModule) -> PersistenceModule:
    first = modules[0]
    p, shape = first.p, first.shape
    for m in modules:
        if m.shape != shape or m.p != p:
            raise DimensionError("direct sum of modules on different shapes")
    dims = [sum(m.dims[x] for m in modules) for x in range(shape.n_points)]
    maps = []
    for i in range(len(shape.directions)):
        blocks = [m.maps[i] for m in modules]
        rows = []
        col_off = 0
        total_cols = sum(b.cols for b in blocks)
        for b in blocks:
            for r in b.data:
                rows.append((0,) * col_off + r + (0,) * (total_cols - col_off - b.cols))
            col_off += b.cols
        maps.append(Matrix(len(rows), total_cols, p, tuple(rows)))
    return PersistenceModule(shape, tuple(dims), tuple(maps), p)


def dual_module(v: PersistenceModule) -> PersistenceModule:
    """Pointwise dual on the opposite poset, renumbered left to right.

    Point ``x`` of ``v`` becomes point ``n+1-x``; every map is transposed.
    """
    maps = tuple(m.transpose() for m in reversed(v.maps))
    return PersistenceModule(v.shape.opposite(), tuple(reversed(v.dims)), maps, v.p)


def reverse_points(v: PersistenceModule) -> PersistenceModule:
    """The same module with the point numbering reversed (no dualizing)."""
    return PersistenceModule(v.shape.reversed(), tuple(reversed(v.dims)), tuple(reversed(v.maps)), v.p)


def restrict(v: PersistenceModule, lo: int, hi: int) -> PersistenceModule:
    """Restriction to points ``lo..hi``; the result is renumbered from 1."""
    if not 1 <= lo <= hi <= v.n_points:
        raise PreconditionError(f"range [{lo},{hi}] outside 1..{v.n_points}")
    return PersistenceModule(v.shape.sub(lo, hi), v.dims[lo - 1:hi], v.maps[lo - 1:hi - 1], v.p)


def restrict_decomposition(d: Decomposition, lo: int, hi: int) -> Decomposition:
    parts = (s.restrict(lo, hi) for s in d.summands)
    return Decomposition(restrict(d.module, lo, hi), tuple(s for s in parts if s is not None))


def extend_summand_by_zero(u: Summand, offset: int, full: PersistenceModule,
                           cut_points: Sequence[int]) -> Summand:
    """Regard a summand of the restriction to ``offset+1..`` as a summand of ``full``.

    ``cut_points`` are the (full-shape) extrema where the sub-range was cut
    off; the summand must vanish at each of them.
    """
    moved = u.shift(offset)
    if moved.interval.hi > full.n_points:
        raise PreconditionError("summand does not fit in the full shape")
    for z in cut_points:
        if z in moved.interval:
            raise PreconditionError(f"summand {moved.interval} is nonzero at cut point {z}")
    return moved


# ---------------------------------------------------------------------------
# submodules in coordinates


def submodule_in_coordinates(v: PersistenceModule, bases: Sequence[Matrix]) -> PersistenceModule:
    """The submodule spanned by ``bases[x-1]`` (columns) at each point, in those coordinates.

    Raises ``PreconditionError`` if the spans are not closed under the maps.
    """
    maps = []
    for i, m in enumerate(v.maps):
        src, tgt = v.arrow(i)
        try:
            maps.append(linalg.solve_matrix(bases[tgt - 1], m @ bases[src - 1]))
        except ValueError:
            raise PreconditionError(f"spans are not closed under map {i}") from None
    return PersistenceModule(v.shape, tuple(b.cols for b in bases), tuple(maps), v.p)


def is_submodule(v: PersistenceModule, spaces: Sequence[Subspace]) -> bool:
    for i, m in enumerate(v.maps):
        src, tgt = v.arrow(i)
        if not linalg.push(m, spaces[src - 1]) <= spaces[tgt - 1]:
            return False
    return True


def hom_basis(shape: ZigzagShape, a: Interval, b: Interval, p: int) -> tuple[list, list]:
    """Basis of Hom(M(a), M(b)) as ``(basis, points)``: each basis element is a
    list of scalars, one per point of ``points`` (the intersection).

    A morphism between constant modules is one scalar per point of the
    intersection; commutation with every arrow gives linear constraints.
    """
    ma, mb = constant_module(shape, a, p), constant_module(shape, b, p)
    n = shape.n_points
    common = [x for x in range(1, n + 1) if x in a and x in b]
    index = {x: k for k, x in enumerate(common)}
    rows = []
    for i in range(len(shape.directions)):
        src, tgt = ma.arrow(i)
        # M(b)_{src,tgt} f_src = f_tgt M(a)_{src,tgt}; each side is 0 or one scalar
        left = src in b and tgt in b and src in a
        right = src in a and tgt in a and tgt in b
        row = [0] * len(common)
        if left:
            row[index[src]] += 1
        if right:
            row[index[tgt]] -= 1
        if any(x % p for x in row):
            rows.append([x % p for x in row])
    if not common:
        return [], common
    return linalg._null_space_rows(rows, len(common), p), common


def compose_homs(shape: ZigzagShape, f: Sequence[int], f_points: Sequence[int],
                 g: Sequence[int], g_points: Sequence[int], p: int) -> dict:
    """Pointwise product of two homs given as scalars on their point sets."""
    fd = dict(zip(f_points, f))
    gd = dict(zip(g_points, g))
    return {x: fd[x] * gd[x] % p for x in fd if x in gd}


# ---------------------------------------------------------------------------
# random instances


def random_shape(rng: random.Random, n_points: int) -> ZigzagShape:
    return ZigzagShape(tuple(rng.choice((FORWARD, BACKWARD)) for _ in range(n_points - 1)))


def random_module(rng: random.Random, n_points: int, max_dim: int, p: int,
                  shape: ZigzagShape | None = None, min_dim: int = 0) -> PersistenceModule:
    """Uniform directions, dims uniform in ``min_dim..max_dim``, uniform matrix entries."""
    if shape is None:
        shape = random_shape(rng, n_points)
    dims = [rng.randint(min_dim, max_dim) for _ in range(shape.n_points)]
    maps = []
    for i, d in enumerate(shape.directions):
        src, tgt = (i, i + 1) if d == FORWARD else (i + 1, i)
        maps.append(Matrix.random(dims[tgt], dims[src], p, rng))
    return PersistenceModule(shape, tuple(dims), tuple(maps), p)


def concatenate(a: PersistenceModule, b: PersistenceModule) -> PersistenceModule:
    """Glue ``b`` after ``a``, identifying the last point of ``a`` with the first of ``b``."""
    if a.p != b.p:
        raise DimensionError(f"cannot glue GF({a.p}) to GF({b.p})")
    if a.dims[-1] != b.dims[0]:
        raise DimensionError(f"gluing point has dim {a.dims[-1]} on the left and {b.dims[0]} on the right")
    shape = ZigzagShape(a.shape.directions + b.shape.directions)
    return PersistenceModule(shape, a.dims + b.dims[1:], a.maps + b.maps, a.p)


def point_module(dim: int, p: int) -> PersistenceModule:
    return PersistenceModule(ZigzagShape(()), (dim,), (), p)
