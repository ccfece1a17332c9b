import itertools
import random

import pytest

from intdecomp.linalg import Matrix
from intdecomp.pmod import FORWARD, PersistenceModule, ZigzagShape


@pytest.fixture
def rng():
    return random.Random(20240611)


def all_matrices(rows, cols, p=2):
    for entries in itertools.product(range(p), repeat=rows * cols):
        yield Matrix(rows, cols, p, tuple(tuple(entries[r * cols:(r + 1) * cols]) for r in range(rows)))


def all_modules(n_points, max_dim, p=2, directions=None):
    """Every module over GF(p) with the given number of points and fiber dims <= max_dim."""
    dir_choices = [directions] if directions is not None else itertools.product("FB", repeat=n_points - 1)
    for dirs in dir_choices:
        shape = ZigzagShape(tuple(dirs))
        for dims in itertools.product(range(max_dim + 1), repeat=n_points):
            per_arrow = []
            for i, d in enumerate(shape.directions):
                src, tgt = (i, i + 1) if d == FORWARD else (i + 1, i)
                per_arrow.append(list(all_matrices(dims[tgt], dims[src], p)))
            for maps in itertools.product(*per_arrow):
                yield PersistenceModule(shape, tuple(dims), tuple(maps), p)


def chain_shape(n):
    return ZigzagShape.chain(n)
