import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intdecomp import linalg
from intdecomp.linalg import (
    BasisWithLabels,
    CompatibilityError,
    DimensionError,
    Flag,
    Matrix,
    Subspace,
    column_reduce,
    common_basis,
    complete_flag,
    image,
    intersect,
    inverse,
    is_compatible,
    kernel,
    perp,
    preimage,
    rank,
    solve,
    sum_,
    transpose_map,
)


def M(rows, p):
    return Matrix.from_rows(rows, p)


def span(vs, n, p):
    return Subspace.span(vs, n, p)


def random_subspace(rng, n, p):
    k = rng.randint(0, n)
    return image(Matrix.random(n, k, p, rng))


def random_flag(rng, n, p):
    chain = [random_subspace(rng, n, p)]
    for _ in range(rng.randint(0, 3)):
        extra = [tuple(rng.randrange(p) for _ in range(n)) for _ in range(rng.randint(1, 2))]
        chain.append(span(chain[-1].vectors + tuple(extra), n, p))
    return Flag.from_chain(chain, n, p)


# --- examples --------------------------------------------------------------

def test_column_reduce_examples():
    _, r, _ = column_reduce(Matrix.zeros(3, 2, 5))
    assert r == 0
    red, r, t = column_reduce(Matrix.identity(3, 7))
    assert r == 3 and red == Matrix.identity(3, 7)
    _, r, _ = column_reduce(M([[1, 1], [1, 1]], 2))
    assert r == 1


def test_column_reduce_contract(rng):
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        m = Matrix.random(rng.randint(0, 5), rng.randint(0, 5), p, rng)
        red, r, t = column_reduce(m)
        assert m @ t == red
        assert rank(t) == t.rows
        assert sum(1 for c in red.columns() if any(c)) == r
        assert all(not any(c) for c in red.columns()[r:])


def test_image_examples():
    assert image(Matrix.identity(3, 5)) == Subspace.full(3, 5)
    assert image(Matrix.zeros(3, 2, 5)) == Subspace.zero(3, 5)
    assert image(M([[1, 2], [2, 4]], 5)) == span([(1, 2)], 2, 5)


def test_kernel_examples():
    assert kernel(Matrix.identity(3, 3)) == Subspace.zero(3, 3)
    assert kernel(Matrix.zeros(2, 3, 3)) == Subspace.full(3, 3)
    assert kernel(M([[1, 1]], 2)) == span([(1, 1)], 2, 2)


def test_preimage_examples():
    m = M([[1, 0], [0, 0]], 2)
    assert preimage(m, Subspace.full(2, 2)) == Subspace.full(2, 2)
    s = span([(1, 1)], 2, 2)
    assert preimage(Matrix.identity(2, 2), s) == s
    assert preimage(m, span([(1, 0)], 2, 2)) == Subspace.full(2, 2)
    with pytest.raises(DimensionError):
        preimage(m, Subspace.full(3, 2))


def test_sum_intersect_examples():
    a, b = span([(1, 0)], 2, 2), span([(1, 1)], 2, 2)
    assert intersect(a, Subspace.full(2, 2)) == a
    assert intersect(a, Subspace.zero(2, 2)) == Subspace.zero(2, 2)
    assert intersect(a, b) == Subspace.zero(2, 2)
    assert sum_(a, b) == Subspace.full(2, 2)
    with pytest.raises(DimensionError):
        sum_(a, Subspace.full(3, 2))


def test_perp_examples():
    assert perp(Subspace.zero(3, 5)) == Subspace.full(3, 5)
    assert perp(Subspace.full(3, 5)) == Subspace.zero(3, 5)
    assert perp(span([(1, 1)], 2, 3)) == span([(1, 2)], 2, 3)


def test_transpose_examples():
    assert transpose_map(Matrix.identity(3, 5)) == Matrix.identity(3, 5)
    assert transpose_map(Matrix.zeros(2, 3, 5)) == Matrix.zeros(3, 2, 5)
    m = M([[1, 1]], 2)
    assert image(transpose_map(m)) == span([(1, 1)], 2, 2) == perp(kernel(m))


def test_complete_flag_examples():
    f = complete_flag(Flag.from_chain([Subspace.zero(2, 2), Subspace.full(2, 2)], 2, 2))
    assert f.is_complete() and len(f) == 3
    done = Flag.from_chain([Subspace.zero(2, 3), span([(1, 0)], 2, 3), Subspace.full(2, 3)], 2, 3)
    assert complete_flag(done) == done
    e1 = span([(1, 0, 0)], 3, 2)
    f = complete_flag(Flag.from_chain([Subspace.zero(3, 2), e1, Subspace.full(3, 2)], 3, 2))
    assert f.is_complete() and len(f) == 4 and e1 in f.spaces


def test_common_basis_examples():
    std = complete_flag(Flag.from_chain([span([(1, 0, 0)], 3, 5), span([(1, 0, 0), (0, 1, 0)], 3, 5)], 3, 5))
    b = common_basis(std, std)
    assert is_compatible(b, std)
    empty = Flag(0, 2, (Subspace.zero(0, 2),))
    assert common_basis(empty, empty).vectors == ()
    f = Flag.from_chain([Subspace.zero(2, 2), span([(1, 0)], 2, 2), Subspace.full(2, 2)], 2, 2)
    g = Flag.from_chain([Subspace.zero(2, 2), span([(1, 1)], 2, 2), Subspace.full(2, 2)], 2, 2)
    b = common_basis(f, g)
    assert is_compatible(b, f) and is_compatible(b, g)
    assert set(b.vectors) == {(1, 0), (1, 1)}
    with pytest.raises(DimensionError):
        common_basis(f, Flag(3, 2, (Subspace.zero(3, 2),)))


def test_gf2_dim2_certificate_search():
    """All 6 ordered bases of GF(2)^2 against the two line flags."""
    f = Flag.from_chain([Subspace.zero(2, 2), span([(1, 0)], 2, 2), Subspace.full(2, 2)], 2, 2)
    g = Flag.from_chain([Subspace.zero(2, 2), span([(1, 1)], 2, 2), Subspace.full(2, 2)], 2, 2)
    nonzero = [(1, 0), (0, 1), (1, 1)]
    ordered = [b for b in itertools.permutations(nonzero, 2)]
    assert len(ordered) == 6
    good = [b for b in ordered if is_compatible(BasisWithLabels(2, 2, b, (0, 1)), f)
            and is_compatible(BasisWithLabels(2, 2, b, (0, 1)), g)]
    assert {frozenset(b) for b in good} == {frozenset({(1, 0), (1, 1)})}
    assert tuple(common_basis(f, g).vectors) in good


def test_flag_must_increase():
    with pytest.raises(ValueError):
        Flag(2, 2, (Subspace.full(2, 2), Subspace.zero(2, 2)))
    with pytest.raises(ValueError):
        Flag.from_chain([span([(1, 0)], 2, 2), span([(0, 1)], 2, 2)], 2, 2)


def test_basis_labels():
    with pytest.raises(ValueError):
        BasisWithLabels(2, 2, ((1, 0), (0, 1)), ("a", "a"))
    b = BasisWithLabels(2, 3, ((1, 1), (0, 1)), ("a", "b"))
    assert b.vector("b") == (0, 1)
    d = b.dual()
    # dual basis pairs to the identity
    for v, lab in zip(b.vectors, b.labels):
        for w, lab2 in zip(d.vectors, d.labels):
            assert sum(x * y for x, y in zip(v, w)) % 3 == int(lab == lab2)


def test_solve_and_inverse(rng):
    for _ in range(200):
        p = rng.choice([2, 3, 7])
        n = rng.randint(1, 5)
        m = Matrix.random(n, n, p, rng)
        if rank(m) == n:
            assert m @ inverse(m) == Matrix.identity(n, p)
        b = tuple(rng.randrange(p) for _ in range(n))
        x = solve(m, b)
        if x is None:
            assert not image(m).contains(b)
        else:
            assert m.apply(x) == b
    with pytest.raises(ZeroDivisionError):
        inverse(M([[1, 1], [1, 1]], 2))


# --- properties ------------------------------------------------------------

def test_canonicity_under_change_of_basis(rng):
    for _ in range(300):
        p = rng.choice([2, 3, 5])
        n = rng.randint(1, 6)
        m = Matrix.random(n, rng.randint(0, 6), p, rng)
        k = m.cols
        t = Matrix.random(k, k, p, rng)
        if rank(t) < k:
            continue
        a, b = image(m), image(m @ t)
        assert a == b and a.vectors == b.vectors
        q = Matrix.random(rng.randint(0, 4), n, p, rng)
        s = random_subspace(rng, q.rows, p)
        # same space, spanned by random combinations plus redundant vectors
        mixed = s.basis @ Matrix.random(s.dim, s.dim + 2, p, rng)
        if image(mixed) == s:
            assert preimage(q, image(mixed)).vectors == preimage(q, s).vectors
        # kernel is the same for row-equivalent matrices
        r = Matrix.random(q.rows, q.rows, p, rng)
        if rank(r) == q.rows:
            assert kernel(q).vectors == kernel(r @ q).vectors


def test_perp_involution_and_order(rng):
    for _ in range(300):
        p = rng.choice([2, 5])
        n = rng.randint(0, 8)
        b = random_subspace(rng, n, p)
        a = span(b.vectors[:rng.randint(0, b.dim)], n, p)
        assert perp(perp(b)) == b
        assert perp(b).dim == n - b.dim
        assert a <= b and perp(b) <= perp(a)


def test_transpose_fact(rng):
    for _ in range(300):
        p = rng.choice([2, 3, 5])
        m = Matrix.random(rng.randint(0, 8), rng.randint(0, 8), p, rng)
        assert image(transpose_map(m)) == perp(kernel(m))


def test_rank_nullity(rng):
    for _ in range(300):
        p = rng.choice([2, 3, 101])
        m = Matrix.random(rng.randint(0, 7), rng.randint(0, 7), p, rng)
        assert rank(m) + kernel(m).dim == m.cols
        assert rank(m) == image(m).dim


def test_dimension_formula(rng):
    for _ in range(300):
        p = rng.choice([2, 5])
        n = rng.randint(0, 6)
        a, b = random_subspace(rng, n, p), random_subspace(rng, n, p)
        assert a.dim + b.dim == sum_(a, b).dim + intersect(a, b).dim
        assert intersect(a, b) <= a and a <= sum_(a, b)


def test_preimage_contains_kernel(rng):
    for _ in range(200):
        p = rng.choice([2, 3])
        m = Matrix.random(rng.randint(0, 5), rng.randint(0, 5), p, rng)
        s = random_subspace(rng, m.rows, p)
        pre = preimage(m, s)
        assert kernel(m) <= pre
        assert all(s.contains(m.apply(v)) for v in pre.vectors)
        assert linalg.push(m, pre) == intersect(image(m), s)


def test_common_basis_compatible(rng):
    for _ in range(300):
        p = rng.choice([2, 5])
        n = rng.randint(0, 6)
        f, g = random_flag(rng, n, p), random_flag(rng, n, p)
        for r in (None, rng):
            b = common_basis(f, g, r)
            assert is_compatible(b, f) and is_compatible(b, g)


def test_compatibility_predicate_rejects():
    f = Flag.from_chain([span([(1, 1)], 2, 2)], 2, 2)
    b = BasisWithLabels(2, 2, ((1, 0), (0, 1)), (0, 1))
    assert not is_compatible(b, f)
    assert not is_compatible(BasisWithLabels(2, 2, ((1, 0),), (0,)), f)
    assert issubclass(CompatibilityError, ValueError)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]), st.integers(1, 6))
def test_hypothesis_subspace_roundtrip(seed, p, n):
    r = random.Random(seed)
    s = random_subspace(r, n, p)
    assert Subspace.span(s.basis.columns(), n, p) == s
    v = s.random_vector(r)
    assert s.contains(v)
