import pytest

from conftest import all_matrices, all_modules
from intdecomp.decomp import decompose_chain, decompose_zigzag
from intdecomp.linalg import Matrix
from intdecomp.oracle import (
    EXHAUSTIVE_MAX_TOTAL_DIM,
    SearchTooLargeError,
    ValidationReport,
    chain_rank_barcode,
    exhaustive_decompose,
    validate,
)
from intdecomp.pmod import (
    Barcode,
    Decomposition,
    Interval,
    PreconditionError,
    Summand,
    ZigzagShape,
    constant_module,
    module_from_maps,
    zero_module,
)


def bars(*pairs):
    return Barcode.from_intervals(Interval(a, b) for a, b in pairs)


def test_validate_zero_module():
    assert validate(Decomposition(zero_module(ZigzagShape.chain(3), 2), ())).ok


def test_validate_duplicate_generator():
    v = module_from_maps(ZigzagShape(()), [2], [], 2)
    d = Decomposition(v, (Summand(Interval(1, 1), ((1, 0),)), Summand(Interval(1, 1), ((1, 0),))))
    report = validate(d)
    assert not report.ok
    assert ("point", 1) in [w for w, _ in report.failures]


def test_validate_catches_broken_summands():
    v = module_from_maps(ZigzagShape.chain(2), [1, 1], [[[1]]], 3)
    # generator at 1 maps to a nonzero vector but the summand stops at 1
    leaks = Decomposition(v, (Summand(Interval(1, 1), ((1,),)), Summand(Interval(2, 2), ((1,),))))
    assert not validate(leaks).ok
    z = module_from_maps(ZigzagShape.chain(2), [1, 1], [[[0]]], 3)
    dies = Decomposition(z, (Summand(Interval(1, 2), ((1,), (1,))),))
    assert not validate(dies).ok
    missing = Decomposition(v, ())
    assert not validate(missing).ok
    assert str(ValidationReport()) == "ok"


def test_rank_oracle_examples():
    assert chain_rank_barcode(constant_module(ZigzagShape.chain(3), Interval(1, 3), 2)) == bars((1, 3))
    zero_map = module_from_maps(ZigzagShape.chain(2), [1, 1], [[[0]]], 2)
    assert chain_rank_barcode(zero_map) == bars((1, 1), (2, 2))
    with pytest.raises(PreconditionError):
        chain_rank_barcode(module_from_maps(ZigzagShape.from_string("B"), [1, 1], [[[1]]], 2))


def test_exhaustive_examples():
    assert exhaustive_decompose(constant_module(ZigzagShape.chain(2), Interval(1, 2), 2)) == bars((1, 2))
    zero_map = module_from_maps(ZigzagShape.chain(2), [1, 1], [[[0]]], 2)
    assert exhaustive_decompose(zero_map) == bars((1, 1), (2, 2))


def test_exhaustive_refuses():
    big = module_from_maps(ZigzagShape.chain(2), [4, 3], [Matrix.zeros(3, 4, 2)], 2)
    assert big.total_dim() > EXHAUSTIVE_MAX_TOTAL_DIM
    with pytest.raises(SearchTooLargeError):
        exhaustive_decompose(big)
    with pytest.raises(SearchTooLargeError):
        exhaustive_decompose(module_from_maps(ZigzagShape(()), [1], [], 3))


def test_rank_formula_against_exhaustive_all_small_chains():
    """The rank formula is trusted only after this sweep."""
    count = 0
    for n in (1, 2, 3):
        for v in all_modules(n, 2, directions="F" * (n - 1)):
            assert chain_rank_barcode(v) == exhaustive_decompose(v)
            count += 1
    assert count == 3 + 31 + 499


def test_two_point_sweep_against_chain_engine():
    assert len(list(all_matrices(2, 2))) == 16
    for v in all_modules(2, 2, directions="F"):
        d = decompose_chain(v)
        assert validate(d).ok
        assert d.barcode() == exhaustive_decompose(v)


def test_exhaustive_three_point_zigzags():
    for dirs in ("FB", "BF", "BB"):
        for v in all_modules(3, 2, directions=dirs):
            d = decompose_zigzag(v)
            assert validate(d).ok
            assert d.barcode() == exhaustive_decompose(v)
