"""Right-extension of zigzag decompositions, one monotone block at a time.

A stream is a sequence of blocks.  Each block is a monotone module with at
least two points; its first point is glued to the last point of the module
built so far and consecutive blocks must point in opposite directions, so
the gluing points are exactly the extrema ``z_0, z_1, ...`` of the result.

Bars that do not reach the current right end are *closed*: every later
truncation has exactly these bars strictly to the left of that end, so they
never change again.  Bars through the right end are *open*.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from . import linalg
from .decomp import _decompose_monotone, _recoordinate, decompose_zigzag, normalize_summand
from .linalg import Matrix
from .pmod import (
    BACKWARD,
    FORWARD,
    Barcode,
    Decomposition,
    Interval,
    PersistenceModule,
    PreconditionError,
    Summand,
    ZigzagShape,
    concatenate,
    extend_summand_by_zero,
    point_module,
    restrict,
    reverse_points,
    submodule_in_coordinates,
)


class StreamError(ValueError):
    """A malformed block; ``position`` is its 0-based index in the stream."""

    def __init__(self, position: int, message: str):
        super().__init__(f"block {position}: {message}")
        self.position = position


def truncate(v: PersistenceModule, n: int) -> PersistenceModule:
    """Restriction to the points from ``z_0`` up to the extremum ``z_n``."""
    ext = v.shape.extrema()
    if not 0 <= n < len(ext):
        raise PreconditionError(f"no extremum z_{n}: the shape has {len(ext)}")
    return restrict(v, 1, ext[n])


@dataclass(frozen=True)
class MonotonicityEvidence:
    ok: bool
    probed: tuple
    witness: tuple | None = None  # (n, interval) of a bar dying between z_m and z_n

    def __bool__(self):
        return self.ok


def is_monotonic_after(v: PersistenceModule, m: int, probes: Iterable[int],
                       rng: random.Random | None = None) -> MonotonicityEvidence:
    """Check monotonicity after ``z_m`` on the probed truncations ``V(n)``, ``n >= m``.

    The check holds for the probed ``n`` only; barcodes do not depend on the
    decomposition chosen, so inspecting one decomposition per ``n`` suffices.
    """
    ext = v.shape.extrema()
    if not 0 <= m < len(ext):
        raise PreconditionError(f"no extremum z_{m}")
    probed = tuple(sorted({n for n in probes if m <= n < len(ext)}))
    for n in probed:
        zn, zm = ext[n], ext[m]
        d = decompose_zigzag(restrict(v, 1, zn), rng)
        for s in d.summands:
            if zn not in s.interval and s.interval.hi >= zm:
                return MonotonicityEvidence(False, probed, (n, s.interval))
    return MonotonicityEvidence(True, probed)


def _check_extension(old: PersistenceModule, new: PersistenceModule):
    n_old = old.n_points
    if new.n_points <= n_old:
        raise PreconditionError("the new module does not extend the old one")
    if restrict(new, 1, n_old) != old:
        raise PreconditionError("restriction mismatch: the new module does not extend the decomposed one")
    tail = new.shape.directions[n_old - 1:]
    if len(set(tail)) != 1:
        raise PreconditionError("the appended part is not a single monotone block")
    if n_old > 1 and old.shape.directions[-1] == tail[0]:
        raise PreconditionError("the appended block does not turn at the old end point")


def block_is_monotone_step(block: Decomposition) -> bool:
    """True when every bar of the new block reaches its far end."""
    last = block.module.n_points
    return all(last in s.interval for s in block.summands)


def extend_decomposition(dec: Decomposition, v_next: PersistenceModule,
                         rng: random.Random | None = None) -> Decomposition:
    """Extend a decomposition of ``V(n)`` to one of ``V(n+1)``.

    Bars that vanish at ``z_n`` are kept unchanged.  When every bar of the
    new block reaches ``z_{n+1}`` the open bars are continued through the
    block as well, so the result restricts to ``dec``.  Otherwise the
    complement of the closed bars is decomposed afresh, using the open bars
    as the known decomposition of its left part.
    """
    old = dec.module
    _check_extension(old, v_next)
    zn, zn1 = old.n_points, v_next.n_points
    closed, open_ = [], []
    for s in dec.summands:
        if zn in s.interval:
            open_.append(s)
        else:
            closed.append(extend_summand_by_zero(s, 0, v_next, [zn]))

    block = restrict(v_next, zn, zn1)
    bdec = _decompose_monotone(block, rng)
    if block_is_monotone_step(bdec):
        return Decomposition(v_next, tuple(closed) + _continue_open(block, bdec, open_, zn))
    return Decomposition(v_next, tuple(closed) + _redecompose_open(v_next, open_, zn, rng))


def _continue_open(block: PersistenceModule, bdec: Decomposition, open_: list, zn: int) -> tuple:
    p = block.p
    through = [normalize_summand(block, s) for s in bdec.summands if 1 in s.interval]
    fresh = [s.shift(zn - 1) for s in bdec.summands if 1 not in s.interval]
    length = block.n_points
    # generators of the through-bars at z_n form a basis of V_{z_n}
    frame = Matrix.from_columns([s.generators[0] for s in through], p, block.dim(1))
    out = []
    for z in open_:
        coeffs = linalg.solve(frame, z.at(zn))
        if coeffs is None:
            raise PreconditionError("open generator is not in the fiber at the old end")
        gens = list(z.generators)
        for x in range(2, length + 1):
            acc = [0] * block.dim(x)
            for c, t in zip(coeffs, through):
                if c:
                    acc = [(a + c * b) % p for a, b in zip(acc, t.at(x))]
            gens.append(tuple(acc))
        out.append(Summand(Interval(z.interval.lo, zn - 1 + length), tuple(gens)))
    return tuple(out) + tuple(fresh)


def _redecompose_open(v_next: PersistenceModule, open_: list, zn: int, rng) -> tuple:
    n = v_next.n_points
    bases, open_w = _recoordinate(v_next, open_, 1, zn)
    w = submodule_in_coordinates(v_next, bases)
    # mirror so that the known left part becomes the known right part
    mirrored = reverse_points(w)
    hint = Decomposition(restrict(mirrored, n + 1 - zn, n), tuple(s.reflect(zn) for s in open_w))
    dw = decompose_zigzag(mirrored, rng, right_hint=hint)
    return tuple(s.reflect(n).transform(bases) for s in dw.summands)


@dataclass(frozen=True)
class StreamResult:
    closed: Barcode
    open: Barcode
    decomposition: Decomposition
    blocks: int
    preserved_steps: int

    @property
    def barcode(self) -> Barcode:
        return self.decomposition.barcode()


def _split_open_closed(dec: Decomposition, ends: tuple) -> tuple[Barcode, Barcode]:
    closed, open_ = [], []
    for s in dec.summands:
        (open_ if any(e in s.interval for e in ends) else closed).append(s.interval)
    return Barcode.from_intervals(closed), Barcode.from_intervals(open_)


def _validate_block(block, position: int, p: int | None, prev: PersistenceModule | None):
    if not isinstance(block, PersistenceModule):
        raise StreamError(position, f"expected a module, got {type(block).__name__}")
    if block.n_points < 2:
        raise StreamError(position, "a block needs at least two points")
    if not block.shape.is_monotone():
        raise StreamError(position, "block is not monotone")
    if p is not None and block.p != p:
        raise StreamError(position, f"block is over GF({block.p}), stream over GF({p})")
    if prev is not None:
        if prev.dims[-1] != block.dims[0]:
            raise StreamError(position, f"first fiber has dim {block.dims[0]}, previous end has {prev.dims[-1]}")
        if prev.n_points > 1 and prev.shape.directions[-1] == block.shape.directions[0]:
            raise StreamError(position, "block points the same way as its predecessor")


def stream_decompose(source: Iterable[PersistenceModule], horizon: int | None = None,
                     rng: random.Random | None = None) -> StreamResult:
    """Consume up to ``horizon`` blocks (all if ``None``) and decompose incrementally."""
    dec = None
    count = preserved = 0
    p = None
    for position, block in enumerate(source):
        if horizon is not None and count >= horizon:
            break
        _validate_block(block, position, p, dec.module if dec else None)
        if dec is None:
            p = block.p
            start = point_module(block.dims[0], p)
            dec = Decomposition(start, tuple(Summand(Interval(1, 1), (g,))
                                             for g in Matrix.identity(block.dims[0], p).columns()))
        v_next = concatenate(dec.module, block)
        before = dec
        dec = extend_decomposition(dec, v_next, rng)
        count += 1
        if _restricts_to(dec, before):
            preserved += 1
    if dec is None:
        empty = Barcode()
        return StreamResult(empty, empty, Decomposition(point_module(0, 2)), 0, 0)
    closed, open_ = _split_open_closed(dec, (dec.module.n_points,))
    return StreamResult(closed, open_, dec, count, preserved)


def _restricts_to(new: Decomposition, old: Decomposition, offset: int = 0) -> bool:
    """Does ``new`` restrict to ``old`` on points ``offset+1 .. offset+len(old)``?"""
    n = old.module.n_points
    want = sorted((s.interval, s.generators) for s in old.summands)
    parts = (s.restrict(offset + 1, offset + n) for s in new.summands)
    got = sorted((r.interval, r.generators) for r in parts if r is not None)
    return got == want


def stream_decompose_two_sided(right: Iterable[PersistenceModule], left: Iterable[PersistenceModule],
                               horizon: int | None = None, start_dim: int | None = None,
                               rng: random.Random | None = None) -> StreamResult:
    """Grow ``V(-n, n)`` around ``z_0`` by alternately appending a right and a left block.

    Left blocks are written left to right; the last point of each is glued
    to the current first point.  Closed bars are those touching neither end.
    """
    right_it, left_it = iter(right), iter(left)
    dec = None
    count = preserved = 0
    p = None
    while horizon is None or count < horizon:
        rb = next(right_it, None)
        lb = next(left_it, None)
        if rb is None and lb is None:
            break
        for side, block in (("right", rb), ("left", lb)):
            if block is None:
                continue
            if dec is None:
                p = block.p
                d0 = block.dims[0] if side == "right" else block.dims[-1]
                if start_dim is not None and start_dim != d0:
                    raise StreamError(count, "first block does not match the start fiber")
                dec = Decomposition(point_module(d0, p), tuple(
                    Summand(Interval(1, 1), (g,)) for g in Matrix.identity(d0, p).columns()))
            before = dec
            if side == "right":
                _validate_block(block, count, p, dec.module)
                dec = extend_decomposition(dec, concatenate(dec.module, block), rng)
            else:
                flipped = reverse_points(block)
                _validate_block(flipped, count, p, reverse_points(dec.module))
                n_old = dec.module.n_points
                mirrored = Decomposition(reverse_points(dec.module),
                                         tuple(s.reflect(n_old) for s in dec.summands))
                ext = extend_decomposition(mirrored, concatenate(mirrored.module, flipped), rng)
                n_new = ext.module.n_points
                dec = Decomposition(reverse_points(ext.module), tuple(s.reflect(n_new) for s in ext.summands))
            offset = 0 if side == "right" else dec.module.n_points - before.module.n_points
            if _restricts_to(dec, before, offset):
                preserved += 1
        count += 1
    if dec is None:
        empty = Barcode()
        return StreamResult(empty, empty, Decomposition(point_module(0, 2)), 0, 0)
    closed, open_ = _split_open_closed(dec, (1, dec.module.n_points))
    return StreamResult(closed, open_, dec, count, preserved)


def random_blocks(rng: random.Random, n_blocks: int, max_dim: int, p: int,
                  max_len: int = 3) -> list[PersistenceModule]:
    """A valid stream: alternating monotone blocks of 1..max_len arrows with random maps."""
    blocks = []
    dim = rng.randint(0, max_dim)
    direction = rng.choice((FORWARD, BACKWARD))
    for _ in range(n_blocks):
        length = rng.randint(1, max_len)
        shape = ZigzagShape((direction,) * length)
        dims = [dim] + [rng.randint(0, max_dim) for _ in range(length)]
        maps = []
        for i in range(length):
            src, tgt = (i, i + 1) if direction == FORWARD else (i + 1, i)
            maps.append(Matrix.random(dims[tgt], dims[src], p, rng))
        blocks.append(PersistenceModule(shape, tuple(dims), tuple(maps), p))
        dim = dims[-1]
        direction = BACKWARD if direction == FORWARD else FORWARD
    return blocks
