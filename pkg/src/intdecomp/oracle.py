"""Independent checks for decompositions.

Nothing here calls into the decomposition engine.  Ranks are computed
with a small standalone elimination routine rather than ``linalg`` so the
rank-formula oracle and the validity checker do not share code paths with
the engine they check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .pmod import (
    FORWARD,
    Barcode,
    Decomposition,
    Interval,
    PersistenceModule,
    PreconditionError,
)

EXHAUSTIVE_MAX_TOTAL_DIM = 6


class SearchTooLargeError(ValueError):
    """The exhaustive oracle refuses instances outside its budget."""


@dataclass
class ValidationReport:
    ok: bool = True
    failures: list = field(default_factory=list)

    def fail(self, where, message: str):
        self.ok = False
        self.failures.append((where, message))

    def __str__(self):
        if self.ok:
            return "ok"
        return "; ".join(f"{w}: {m}" for w, m in self.failures)


def _rank(rows, p: int) -> int:
    rows = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], p - 2, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _apply(data, v, p):
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in data)


def validate(d: Decomposition) -> ValidationReport:
    """Check that ``d`` is an internal direct sum of interval submodules."""
    v = d.module
    p, n = v.p, v.n_points
    report = ValidationReport()

    for k, s in enumerate(d.summands):
        iv = s.interval
        if not (1 <= iv.lo <= iv.hi <= n):
            report.fail(("summand", k), f"interval {iv} outside 1..{n}")
            continue
        if len(s.generators) != len(iv):
            report.fail(("summand", k), "generator count differs from interval length")
            continue
        for x, g in zip(iv.points(), s.generators):
            if len(g) != v.dim(x) or not any(c % p for c in g):
                report.fail(("point", x), f"summand {k} has a zero or malformed generator")
    if not report.ok:
        return report

    # (a) generators at each point form a basis of the fiber
    for x in range(1, n + 1):
        gens = [s.at(x) for s in d.summands if x in s.interval]
        if len(gens) != v.dim(x):
            report.fail(("point", x), f"{len(gens)} generators for a fiber of dim {v.dim(x)}")
        elif gens and _rank(gens, p) != len(gens):
            report.fail(("point", x), "generators are linearly dependent")

    # (b) each summand is closed under the maps, with nonzero scalars inside
    for i, m in enumerate(v.maps):
        src, tgt = (i + 1, i + 2) if v.shape.directions[i] == FORWARD else (i + 2, i + 1)
        for k, s in enumerate(d.summands):
            g = s.at(src)
            if g is None:
                continue
            img = _apply(m.data, g, p)
            h = s.at(tgt)
            if h is None:
                if any(img):
                    report.fail(("arrow", i), f"summand {k} leaves its interval")
                continue
            if not any(img):
                report.fail(("arrow", i), f"summand {k} dies inside its interval")
            elif _rank([img, h], p) != 1:
                report.fail(("arrow", i), f"summand {k} is not mapped onto its own line")
    return report


def _composed_rank(v: PersistenceModule, b: int, d: int) -> int:
    """Rank of the composed map from point ``b`` to point ``d`` of a forward chain."""
    p = v.p
    if b > d:
        return 0
    # track the image of the standard basis of V_b
    vecs = [tuple(int(i == j) for j in range(v.dim(b))) for i in range(v.dim(b))]
    for x in range(b, d):
        vecs = [_apply(v.maps[x - 1].data, u, p) for u in vecs]
    return _rank(vecs, p) if vecs else 0


def chain_rank_barcode(v: PersistenceModule) -> Barcode:
    """Barcode of a forward chain by inclusion-exclusion over ranks of composed maps."""
    if not v.shape.is_chain():
        raise PreconditionError("rank formula needs a forward chain")
    n = v.n_points
    r = {}
    for b in range(1, n + 1):
        for d in range(b, n + 1):
            r[b, d] = _composed_rank(v, b, d)

    def rk(b, d):
        if b < 1 or d > n:
            return 0
        return r[b, d]

    counts = {}
    for b in range(1, n + 1):
        for d in range(b, n + 1):
            mult = rk(b, d) - rk(b - 1, d) - rk(b, d + 1) + rk(b - 1, d + 1)
            if mult < 0:
                raise AssertionError("negative multiplicity from the rank formula")
            if mult:
                counts[Interval(b, d)] = mult
    return Barcode.from_counts(counts)


def _nonzero_vectors(dim: int):
    return [t for t in itertools.product((0, 1), repeat=dim) if any(t)]


def _candidate_summands(v: PersistenceModule):
    """All interval submodules of a GF(2) module, as (interval, generators)."""
    n = v.n_points
    found = []
    for lo in range(1, n + 1):
        # extend generator tuples to the right one point at a time
        partial = [(g,) for g in _nonzero_vectors(v.dim(lo))]
        # the arrow entering lo from the left must not hit the summand
        if lo > 1 and v.shape.directions[lo - 2] != FORWARD:
            m = v.maps[lo - 2]
            partial = [t for t in partial if not any(_apply(m.data, t[0], 2))]
        for hi in range(lo, n + 1):
            if not partial:
                break
            # closing at hi: the arrow leaving hi to the right must kill the generator
            if hi == n:
                closed = partial
            else:
                m = v.maps[hi - 1]
                if v.shape.directions[hi - 1] == FORWARD:
                    closed = [t for t in partial if not any(_apply(m.data, t[-1], 2))]
                else:
                    closed = partial
            found.extend((Interval(lo, hi), t) for t in closed)
            if hi == n:
                break
            m = v.maps[hi - 1]
            nxt = []
            for t in partial:
                if v.shape.directions[hi - 1] == FORWARD:
                    img = _apply(m.data, t[-1], 2)
                    if any(img):
                        nxt.append(t + (img,))
                else:
                    for g in _nonzero_vectors(v.dim(hi + 1)):
                        if _apply(m.data, g, 2) == t[-1]:
                            nxt.append(t + (g,))
            partial = nxt
    return found


def exhaustive_decompose(v: PersistenceModule) -> Barcode:
    """Barcode of a tiny GF(2) module by brute-force search for a direct sum of interval submodules."""
    if v.p != 2:
        raise SearchTooLargeError("exhaustive search is only implemented over GF(2)")
    if v.total_dim() > EXHAUSTIVE_MAX_TOTAL_DIM:
        raise SearchTooLargeError(
            f"total dimension {v.total_dim()} exceeds the budget of {EXHAUSTIVE_MAX_TOTAL_DIM}")
    n = v.n_points
    by_lo = {x: [] for x in range(1, n + 1)}
    for iv, gens in _candidate_summands(v):
        by_lo[iv.lo].append((iv, gens))

    chosen = {x: [] for x in range(1, n + 1)}
    picked = []

    def search() -> bool:
        x = next((y for y in range(1, n + 1) if len(chosen[y]) < v.dim(y)), None)
        if x is None:
            return True
        for iv, gens in by_lo[x]:
            ok = True
            for y, g in zip(iv.points(), gens):
                if len(chosen[y]) >= v.dim(y) or _rank(chosen[y] + [g], 2) != len(chosen[y]) + 1:
                    ok = False
                    break
            if not ok:
                continue
            for y, g in zip(iv.points(), gens):
                chosen[y].append(g)
            picked.append(iv)
            if search():
                return True
            picked.pop()
            for y in iv.points():
                chosen[y].pop()
        return False

    if not search():
        raise AssertionError("no interval decomposition found")
    return Barcode.from_intervals(picked)
