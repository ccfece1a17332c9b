"""Exact interval decomposition of chain and zigzag persistence modules over GF(p)."""

from .decomp import decompose, decompose_chain, decompose_zigzag
from .field import FieldScalar, FieldSpec
from .oracle import chain_rank_barcode, exhaustive_decompose, validate
from .pmod import (
    Barcode,
    Decomposition,
    Interval,
    PersistenceModule,
    Summand,
    ZigzagShape,
    constant_module,
    dual_module,
    module_from_maps,
    random_module,
    restrict,
)
from .streaming import extend_decomposition, is_monotonic_after, stream_decompose, stream_decompose_two_sided

__all__ = [
    "Barcode", "Decomposition", "FieldScalar", "FieldSpec", "Interval", "PersistenceModule",
    "Summand", "ZigzagShape", "chain_rank_barcode", "constant_module", "decompose",
    "decompose_chain", "decompose_zigzag", "dual_module", "exhaustive_decompose",
    "extend_decomposition", "is_monotonic_after", "module_from_maps", "random_module",
    "restrict", "stream_decompose", "stream_decompose_two_sided", "validate",
]
