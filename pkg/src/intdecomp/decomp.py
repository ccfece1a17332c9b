"""Interval decomposition of modules over chains and finite zigzags.

The chain case peels one interval summand at a time: pick a point ``z``
with a nonzero fiber, find a basis of ``V_z`` compatible with both the
flag of images and the flag of kernels at ``z``, and split the left and
right halves with the chosen basis vector.

The zigzag case inducts on the number of extrema.  Decompositions of the
two sub-zigzags obtained by dropping the first or the last monotone block
either expose a summand that can be extended by zero, or show that the
middle part is a direct sum of copies of one constant module, in which
case the outer chains are split along a common basis.

Every entry point takes an optional ``random.Random``.  Without one, all
choices are deterministic (first nonzero point, first basis label, first
reduced vector); with one, they are randomized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Hashable, Sequence

from . import linalg
from .linalg import BasisWithLabels, CompatibilityError, Flag, Matrix, Subspace
from .pmod import (
    FORWARD,
    Decomposition,
    Interval,
    PersistenceModule,
    PreconditionError,
    Summand,
    dual_module,
    extend_summand_by_zero,
    restrict,
    reverse_points,
    submodule_in_coordinates,
)

IMAGES = "images"
KERNELS = "kernels"


class InvariantError(AssertionError):
    """An internal consistency check of the engine failed."""


@dataclass(frozen=True)
class FlagAt:
    point: int
    flag: Flag
    kind: str


@dataclass(frozen=True)
class SplitResult:
    """``u`` is the interval summand; ``w_basis[x-1]`` spans the complement at ``x``."""

    u: Summand
    w_basis: tuple

    def w_space(self, x: int) -> Subspace:
        b = self.w_basis[x - 1]
        return Subspace.span(b.columns(), b.rows, b.p)


# ---------------------------------------------------------------------------
# flags


def _require_forward(v: PersistenceModule, lo: int, hi: int):
    if any(d != FORWARD for d in v.shape.directions[lo - 1:hi - 1]):
        raise PreconditionError(f"points {lo}..{hi} do not form a forward chain")


def flag_of_images(v: PersistenceModule, z: int) -> FlagAt:
    """Images in ``V_z`` of the maps from every point ``x <= z``; points ``1..z`` must be a forward chain."""
    _require_forward(v, 1, z)
    p, dz = v.p, v.dim(z)
    composed = Matrix.identity(dz, p)
    spaces = [linalg.image(composed)]
    for x in range(z - 1, 0, -1):
        composed = composed @ v.maps[x - 1]
        spaces.append(linalg.image(composed))
    return FlagAt(z, Flag.from_chain(spaces, dz, p), IMAGES)


def flag_of_kernels(v: PersistenceModule, z: int) -> FlagAt:
    """Kernels of the maps from ``V_z`` to every point ``x >= z``; points ``z..n`` must be a forward chain."""
    _require_forward(v, z, v.n_points)
    p, dz = v.p, v.dim(z)
    composed = Matrix.identity(dz, p)
    spaces = [linalg.kernel(composed)]
    for x in range(z, v.n_points):
        composed = v.maps[x - 1] @ composed
        spaces.append(linalg.kernel(composed))
    return FlagAt(z, Flag.from_chain(spaces, dz, p), KERNELS)


# ---------------------------------------------------------------------------
# splitting a chain at its maximum / minimum


def _affine_preimage(m: Matrix, point: tuple, linear: Subspace):
    """``{u : m u in point + linear}`` as ``(particular, linear part)`` or ``None``."""
    ann = linalg.perp(linear).vectors
    p = m.p
    mcols = m.columns()
    rows = [[sum(a * b for a, b in zip(alpha, c)) % p for c in mcols] for alpha in ann]
    rhs = [sum(a * b for a, b in zip(alpha, point)) % p for alpha in ann]
    system = Matrix(len(rows), m.cols, p, tuple(tuple(r) for r in rows))
    particular = linalg.solve(system, rhs)
    if particular is None:
        return None
    return particular, linalg.kernel(system)


def split_at_max(v: PersistenceModule, basis: BasisWithLabels, pick: Hashable,
                 rng: random.Random | None = None) -> SplitResult:
    """Split off the interval summand through ``basis[pick]`` at the last point of a forward chain.

    The summand is supported on the points whose composed map to the top
    hits the picked vector; the complement is the preimage of the span of
    the other basis vectors.
    """
    n = v.n_points
    _require_forward(v, 1, n)
    if v.dim(n) == 0:
        raise PreconditionError("fiber at the maximum is zero")
    if not linalg.is_compatible(basis, flag_of_images(v, n).flag):
        raise CompatibilityError("basis is not compatible with the flag of images")
    p = v.p
    top = basis.vector(pick)
    rest = Subspace.span(basis.without(pick), v.dim(n), p)

    # successive affine preimages of the picked vector, walking left
    affine = [None] * n
    affine[n - 1] = (top, Subspace.zero(v.dim(n), p))
    lo = n
    for x in range(n - 1, 0, -1):
        nxt = _affine_preimage(v.maps[x - 1], *affine[x])
        if nxt is None:
            break
        affine[x - 1] = nxt
        lo = x
    particular, linear = affine[lo - 1]
    start = particular
    if rng is not None and linear.dim:
        shift = linear.random_vector(rng)
        start = tuple((a + b) % p for a, b in zip(particular, shift))
    gens = [start]
    for x in range(lo, n):
        gens.append(v.maps[x - 1].apply(gens[-1]))
    if gens[-1] != tuple(top):
        raise InvariantError("lift does not reach the picked vector")

    w = [None] * n
    w[n - 1] = rest
    for x in range(n - 1, 0, -1):
        w[x - 1] = linalg.preimage(v.maps[x - 1], w[x])
    return SplitResult(Summand(Interval(lo, n), tuple(gens)), tuple(s.basis for s in w))


def split_at_min(v: PersistenceModule, basis: BasisWithLabels, pick: Hashable,
                 rng: random.Random | None = None) -> SplitResult:
    """Split off the summand through ``basis[pick]`` at the first point of a forward chain.

    Works on the dual module: the dual basis is compatible with the flag of
    images there, the dual split is pulled back by annihilators.
    """
    n = v.n_points
    _require_forward(v, 1, n)
    if v.dim(1) == 0:
        raise PreconditionError("fiber at the minimum is zero")
    if not linalg.is_compatible(basis, flag_of_kernels(v, 1).flag):
        raise CompatibilityError("basis is not compatible with the flag of kernels")
    p = v.p
    dual = dual_module(v)
    dres = split_at_max(dual, basis.dual(), pick, rng)
    # point x of v is point n+1-x of the dual
    u_spaces, w_spaces = [], []
    for x in range(1, n + 1):
        dx = n + 1 - x
        w_frak = dres.u.at(dx)
        w_frak_space = Subspace.span([w_frak] if w_frak is not None else [], v.dim(x), p)
        u_spaces.append(linalg.perp(dres.w_space(dx)))
        w_spaces.append(linalg.perp(w_frak_space))

    top = basis.vector(pick)
    gens = [tuple(top)]
    hi = 1
    for x in range(1, n):
        nxt = v.maps[x - 1].apply(gens[-1])
        if u_spaces[x].dim == 0:
            if any(nxt):
                raise InvariantError("summand is not closed under the structure map")
            break
        if not any(nxt) or not u_spaces[x].contains(nxt):
            raise InvariantError("pushed generator leaves the summand")
        gens.append(nxt)
        hi = x + 1
    expected = dres.u.interval.reflect(n)
    if expected != Interval(1, hi):
        raise InvariantError(f"dual interval {expected} disagrees with [1,{hi}]")
    return SplitResult(Summand(Interval(1, hi), tuple(gens)), tuple(s.basis for s in w_spaces))


# ---------------------------------------------------------------------------
# chains


def _pick(labels: Sequence, rng: random.Random | None):
    return labels[0] if rng is None else rng.choice(labels)


def peel_chain(v: PersistenceModule, z: int, rng: random.Random | None = None) -> SplitResult:
    """Split one interval summand off a forward chain through the point ``z``."""
    n = v.n_points
    _require_forward(v, 1, n)
    if not 1 <= z <= n or v.dim(z) == 0:
        raise PreconditionError(f"fiber at point {z} is zero")
    left, right = restrict(v, 1, z), restrict(v, z, n)
    f = flag_of_images(left, z).flag
    g = flag_of_kernels(right, 1).flag
    basis = linalg.common_basis(f, g, rng)
    pick = _pick(basis.labels, rng)
    r1 = split_at_max(left, basis, pick, rng)
    r2 = split_at_min(right, basis, pick, rng)
    if r1.u.generators[-1] != r2.u.generators[0] or r1.w_space(z) != r2.w_space(1):
        raise InvariantError("left and right splits disagree at the gluing point")
    u = Summand(Interval(r1.u.interval.lo, z - 1 + r2.u.interval.hi),
                r1.u.generators + r2.u.generators[1:])
    return SplitResult(u, r1.w_basis + r2.w_basis[1:])


def decompose_chain(v: PersistenceModule, rng: random.Random | None = None) -> Decomposition:
    """Interval decomposition of a module over a forward chain."""
    _require_forward(v, 1, v.n_points)
    p = v.p
    summands = []
    cur = v
    embed = [Matrix.identity(d, p) for d in v.dims]
    while not cur.is_zero():
        nonzero = [x for x in range(1, cur.n_points + 1) if cur.dim(x)]
        z = _pick(nonzero, rng)
        res = peel_chain(cur, z, rng)
        summands.append(res.u.transform(embed))
        embed = [e @ b for e, b in zip(embed, res.w_basis)]
        cur = submodule_in_coordinates(cur, res.w_basis)
    return Decomposition(v, tuple(summands))


def _decompose_monotone(v: PersistenceModule, rng) -> Decomposition:
    if v.shape.is_chain():
        return decompose_chain(v, rng)
    flipped = decompose_chain(reverse_points(v), rng)
    n = v.n_points
    return Decomposition(v, tuple(s.reflect(n) for s in flipped.summands))


# ---------------------------------------------------------------------------
# finite zigzags


def _unit(i: int, n: int) -> tuple:
    return tuple(int(j == i) for j in range(n))


def _recoordinate(v: PersistenceModule, summands: Sequence[Summand], lo: int, hi: int):
    """Coordinates for the span of ``summands`` on ``lo..hi`` (all of ``V_x`` elsewhere).

    ``summands`` are numbered locally (point ``lo`` is 1).  Returns the
    per-point basis matrices and the summands rewritten in the new
    coordinates, where each generator becomes a standard unit vector.
    """
    p = v.p
    bases, position, width = [], {}, {}
    for x in range(1, v.n_points + 1):
        if lo <= x <= hi:
            cols = []
            for k, s in enumerate(summands):
                g = s.at(x - lo + 1)
                if g is not None:
                    position[k, x] = len(cols)
                    cols.append(g)
            bases.append(Matrix.from_columns(cols, p, v.dim(x)))
            width[x] = len(cols)
        else:
            bases.append(Matrix.identity(v.dim(x), p))
    rewritten = []
    for k, s in enumerate(summands):
        gens = tuple(_unit(position[k, x + lo - 1], width[x + lo - 1]) for x in s.interval.points())
        rewritten.append(Summand(s.interval, gens))
    return bases, rewritten


def normalize_summand(v: PersistenceModule, s: Summand) -> Summand:
    """Rescale generators so each structure map inside the interval sends generator to generator."""
    gens = [s.generators[0]]
    p = v.p
    for x in range(s.interval.lo, s.interval.hi):
        i = x - 1
        g_next = s.at(x + 1)
        if v.shape.directions[i] == FORWARD:
            gens.append(v.maps[i].apply(gens[-1]))
        else:
            img = v.maps[i].apply(g_next)
            k = next(j for j, c in enumerate(gens[-1]) if c)
            lam = img[k] * pow(gens[-1][k], -1, p) % p
            if lam == 0:
                raise InvariantError("structure map vanishes inside a summand")
            inv = pow(lam, -1, p)
            gens.append(tuple(c * inv % p for c in g_next))
    return Summand(s.interval, tuple(gens))


def _outer_split(chain: PersistenceModule, at_end: bool, basis: BasisWithLabels, pick, rng) -> Summand:
    """Split a monotone chain at its endpoint that is shared with the middle part.

    ``at_end`` says whether the shared point is the last point of ``chain``.
    """
    n = chain.n_points
    forward = chain.shape.is_chain()
    if at_end:
        if forward:
            return split_at_max(chain, basis, pick, rng).u
        return split_at_min(reverse_points(chain), basis, pick, rng).u.reflect(n)
    if forward:
        return split_at_min(chain, basis, pick, rng).u
    return split_at_max(reverse_points(chain), basis, pick, rng).u.reflect(n)


def _outer_flag(chain: PersistenceModule, at_end: bool) -> Flag:
    n = chain.n_points
    forward = chain.shape.is_chain()
    if at_end:
        if forward:
            return flag_of_images(chain, n).flag
        return flag_of_kernels(reverse_points(chain), 1).flag
    if forward:
        return flag_of_kernels(chain, 1).flag
    return flag_of_images(reverse_points(chain), n).flag


def decompose_zigzag(v: PersistenceModule, rng: random.Random | None = None,
                     right_hint: Decomposition | None = None) -> Decomposition:
    """Interval decomposition of a module over a finite zigzag.

    ``right_hint`` may supply an already known decomposition of the
    restriction to the points from the second extremum on; it is used in
    place of the first recursive call.
    """
    ext = v.shape.extrema()
    if len(ext) <= 2:
        return _decompose_monotone(v, rng)
    n, p = v.n_points, v.p
    z2, zl = ext[1], ext[-2]
    summands = []

    # dropping the first block
    a = right_hint if right_hint is not None else decompose_zigzag(restrict(v, z2, n), rng)
    keep = []
    for s in a.summands:
        if s.interval.lo > 1:
            summands.append(extend_summand_by_zero(s, z2 - 1, v, [z2]))
        else:
            keep.append(s)
    bases1, keep_w = _recoordinate(v, keep, z2, n)
    w = submodule_in_coordinates(v, bases1)

    # dropping the last block
    w_left = restrict(w, 1, zl)
    hint_parts = (s.restrict(1, zl - z2 + 1) for s in keep_w)
    hint = Decomposition(restrict(w_left, z2, zl), tuple(s for s in hint_parts if s is not None))
    b = decompose_zigzag(w_left, rng, right_hint=hint)
    keep2 = []
    for s in b.summands:
        if s.interval.hi < zl:
            summands.append(extend_summand_by_zero(s, 0, w, [zl]).transform(bases1))
        else:
            keep2.append(normalize_summand(w_left, s))
    bases2, _ = _recoordinate(w, keep2, 1, zl)
    w2 = submodule_in_coordinates(w, bases2)

    # every remaining bar contains z2..zl; the middle is M(Q)^d in these coordinates
    d = w2.dim(z2)
    if d:
        to_v = [b1 @ b2 for b1, b2 in zip(bases1, bases2)]
        summands.extend(s.transform(to_v) for s in _split_middle(w2, z2, zl, rng))
    elif not w2.is_zero():
        raise InvariantError("complement is nonzero but misses the second extremum")
    return Decomposition(v, tuple(summands))


def _split_middle(w2: PersistenceModule, z2: int, zl: int, rng) -> list[Summand]:
    """Split a module all of whose bars contain ``z2..zl`` into interval summands."""
    n = w2.n_points
    d = w2.dim(z2)
    for x in range(z2, zl + 1):
        if w2.dim(x) != d:
            raise InvariantError("middle part is not a sum of copies of one constant module")
    for i in range(z2 - 1, zl - 1):
        if w2.maps[i] != Matrix.identity(d, w2.p):
            raise InvariantError("middle part is not in normalized coordinates")
    left, right = restrict(w2, 1, z2), restrict(w2, zl, n)
    basis = linalg.common_basis(_outer_flag(left, True), _outer_flag(right, False), rng)
    labels = list(basis.labels)
    if rng is not None:
        rng.shuffle(labels)
    out = []
    for label in labels:
        k1 = _outer_split(left, True, basis, label, rng)
        k2 = _outer_split(right, False, basis, label, rng)
        vec = tuple(basis.vector(label))
        middle = (vec,) * max(0, zl - z2 - 1)
        if z2 == zl:
            gens = k1.generators + k2.generators[1:]
        else:
            gens = k1.generators + middle + k2.generators
        out.append(Summand(Interval(k1.interval.lo, zl - 1 + k2.interval.hi), gens))
    return out


def decompose(v: PersistenceModule, rng: random.Random | None = None) -> Decomposition:
    """Decompose any finite zigzag module (chains included)."""
    return decompose_zigzag(v, rng)
