"""Command line front end: file formats and the ``intdecomp`` subcommands.

Module files are plain text::

    p 5
    points 3
    dirs FB
    dims 1 2 1
    map 1
    1
    3
    map 2
    2 4

Arrow ``i`` joins points ``i`` and ``i+1``; ``F`` points right, ``B`` left.
The rows after ``map i`` are the rows of the matrix from the source fiber to
the target fiber (``dims[target]`` rows of ``dims[source]`` residues).  When
the source fiber is zero the matrix has no columns and no rows are written.
A one-point module writes ``dirs -``.  ``#`` starts a comment.

Exit codes: 0 ok, 1 barcode mismatch, 2 bad input, 3 failed validation.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from .decomp import InvariantError, decompose
from .field import FieldSpec
from .linalg import Matrix
from .oracle import validate
from .pmod import (
    FORWARD,
    Barcode,
    Interval,
    PersistenceModule,
    ZigzagShape,
    random_module,
)
from .streaming import StreamError, stream_decompose

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_INVALID = 0, 1, 2, 3


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass
class _Token:
    text: str
    line: int
    col: int


def _lines(text: str):
    """Yield the non-empty lines as lists of positioned tokens."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in raw.split():
            col = raw.index(part, col)
            toks.append(_Token(part, lineno, col + 1))
            col += len(part)
        if toks:
            yield lineno, toks


def _int(tok: _Token, what: str) -> int:
    try:
        return int(tok.text)
    except ValueError:
        raise ParseError(tok.line, tok.col, f"expected an integer {what}, got {tok.text!r}") from None


def parse_module(text: str) -> PersistenceModule:
    lines = list(_lines(text))
    last_line = lines[-1][0] if lines else 1
    pos = 0

    def header(keyword):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(last_line + 1, 1, f"missing '{keyword}' line")
        lineno, toks = lines[pos]
        if toks[0].text != keyword:
            raise ParseError(lineno, toks[0].col, f"expected '{keyword}', got {toks[0].text!r}")
        pos += 1
        return lineno, toks[1:]

    lineno, rest = header("p")
    if len(rest) != 1:
        raise ParseError(lineno, 1, "'p' takes one prime")
    p = _int(rest[0], "prime")
    try:
        FieldSpec(p)
    except ValueError as e:
        raise ParseError(lineno, rest[0].col, str(e)) from None

    lineno, rest = header("points")
    if len(rest) != 1:
        raise ParseError(lineno, 1, "'points' takes one integer")
    n = _int(rest[0], "point count")
    if n < 1:
        raise ParseError(lineno, rest[0].col, "a module needs at least one point")

    lineno, rest = header("dirs")
    dirs = "".join(t.text for t in rest)
    if dirs == "-":
        dirs = ""
    if len(dirs) != n - 1:
        raise ParseError(lineno, rest[0].col if rest else 1, f"expected {n - 1} directions, got {len(dirs)}")
    for k, ch in enumerate(dirs):
        if ch not in "FB":
            raise ParseError(lineno, rest[0].col + k, f"direction must be F or B, got {ch!r}")
    shape = ZigzagShape.from_string(dirs)

    lineno, rest = header("dims")
    if len(rest) != n:
        raise ParseError(lineno, 1, f"expected {n} dimensions, got {len(rest)}")
    dims = [_int(t, "dimension") for t in rest]
    for t, d in zip(rest, dims):
        if d < 0:
            raise ParseError(t.line, t.col, "dimensions are non-negative")

    maps = []
    for i in range(1, n):
        lineno, rest = header("map")
        if len(rest) != 1 or _int(rest[0], "arrow index") != i:
            raise ParseError(lineno, 1, f"expected 'map {i}'")
        src, tgt = (i, i + 1) if shape.directions[i - 1] == FORWARD else (i + 1, i)
        nrows, ncols = dims[tgt - 1], dims[src - 1]
        rows = []
        for _ in range(nrows if ncols else 0):
            if pos >= len(lines) or lines[pos][1][0].text == "map":
                where = lines[pos][0] if pos < len(lines) else last_line + 1
                raise ParseError(where, 1, f"map {i} needs {nrows} rows")
            lineno, toks = lines[pos]
            pos += 1
            if len(toks) != ncols:
                raise ParseError(lineno, 1, f"map {i} rows have {ncols} entries, got {len(toks)}")
            row = [_int(t, "entry") for t in toks]
            for t, x in zip(toks, row):
                if not 0 <= x < p:
                    raise ParseError(t.line, t.col, f"entry {x} is not a residue mod {p}")
            rows.append(row)
        maps.append(Matrix.zeros(nrows, 0, p) if not ncols else Matrix.from_rows(rows, p, ncols))
    if pos < len(lines):
        lineno, toks = lines[pos]
        raise ParseError(lineno, toks[0].col, f"unexpected {toks[0].text!r} after the last map")
    return PersistenceModule(shape, tuple(dims), tuple(maps), p)


def format_module(v: PersistenceModule) -> str:
    out = [f"p {v.p}", f"points {v.n_points}", f"dirs {''.join(v.shape.directions) or '-'}",
           "dims " + " ".join(map(str, v.dims))]
    for i, m in enumerate(v.maps, 1):
        out.append(f"map {i}")
        if m.cols:
            out.extend(" ".join(map(str, row)) for row in m.data)
    return "\n".join(out) + "\n"


def _bars(barcode: Barcode) -> list[dict]:
    return [{"lo": iv.lo, "hi": iv.hi, "mult": k} for iv, k in barcode.bars]


def barcode_json(barcode: Barcode, p: int, n_points: int) -> str:
    return json.dumps({"p": p, "points": n_points, "bars": _bars(barcode)}, indent=2)


def parse_barcode(text: str) -> tuple[int, int, Barcode]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.colno, e.msg) from None
    try:
        p, n, bars = int(doc["p"]), int(doc["points"]), doc["bars"]
        counts = {}
        for b in bars:
            iv = Interval(int(b["lo"]), int(b["hi"]))
            if int(b["mult"]) <= 0:
                raise ValueError(f"bar {iv} has non-positive multiplicity")
            if not 1 <= iv.lo <= iv.hi <= n:
                raise ValueError(f"bar {iv} lies outside 1..{n}")
            counts[iv] = counts.get(iv, 0) + int(b["mult"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(1, 1, f"malformed barcode file: {e}") from None
    return p, n, Barcode.from_counts(counts)


def barcode_csv(barcode: Barcode) -> str:
    return "".join(f"{iv.lo},{iv.hi},{k}\n" for iv, k in barcode.bars)


def barcode_ascii(barcode: Barcode, n_points: int) -> str:
    rows = []
    for iv, k in barcode.bars:
        line = "." * (iv.lo - 1) + "#" * len(iv) + "." * (n_points - iv.hi)
        rows.append(f"{line}  {iv} x{k}\n")
    return "".join(rows)


def _rng(seed):
    if seed is None:
        env = os.environ.get("PMOD_SEED")
        if env is None or env == "":
            return None
        seed = int(env)
    return random.Random(seed)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _err(msg: str):
    print(f"error: {msg}", file=sys.stderr)


def cmd_decompose(args) -> int:
    try:
        v = parse_module(_read(args.input))
        rng = _rng(args.seed)
    except (OSError, ValueError) as e:
        _err(e)
        return EXIT_INPUT
    try:
        d = decompose(v, rng)
    except InvariantError as e:
        _err(f"internal invariant violated: {e}")
        return EXIT_INVALID
    if args.check:
        report = validate(d)
        if not report.ok:
            _err(f"validation failed: {report}")
            return EXIT_INVALID
    bc = d.barcode()
    if args.format == "json":
        print(barcode_json(bc, v.p, v.n_points))
    elif args.format == "csv":
        sys.stdout.write(barcode_csv(bc))
    else:
        sys.stdout.write(barcode_ascii(bc, v.n_points))
    return EXIT_OK


def first_difference(expected: Barcode, got: Barcode):
    a, b = expected.counts(), got.counts()
    for iv in sorted(set(a) | set(b)):
        if a[iv] != b[iv]:
            return iv, a[iv], b[iv]
    return None


def cmd_verify(args) -> int:
    try:
        v = parse_module(_read(args.module))
        p, n, claimed = parse_barcode(_read(args.barcode))
    except (OSError, ValueError) as e:
        _err(e)
        return EXIT_INPUT
    if (p, n) != (v.p, v.n_points):
        _err(f"barcode is for GF({p}) on {n} points, module is GF({v.p}) on {v.n_points}")
        return EXIT_INPUT
    try:
        actual = decompose(v).barcode()
    except InvariantError as e:
        _err(f"internal invariant violated: {e}")
        return EXIT_INVALID
    diff = first_difference(actual, claimed)
    if diff is None:
        print("ok")
        return EXIT_OK
    iv, want, have = diff
    print(f"mismatch at bar {iv}: module has multiplicity {want}, file has {have}")
    return EXIT_MISMATCH


def cmd_random(args) -> int:
    """Seeded with ``random.Random(seed)`` (Mersenne Twister).  Draw order:
    one ``choice`` per arrow for its direction, one ``randint`` per point
    for its dimension, then matrix entries arrow by arrow in row-major order."""
    if args.points < 1 or args.maxdim < 0:
        _err("need --points >= 1 and --maxdim >= 0")
        return EXIT_INPUT
    try:
        FieldSpec(args.p)
    except ValueError as e:
        _err(e)
        return EXIT_INPUT
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("PMOD_SEED") or 0)
    v = random_module(random.Random(seed), args.points, args.maxdim, args.p)
    sys.stdout.write(format_module(v))
    return EXIT_OK


def split_blocks(text: str) -> list[str]:
    """Split stdin text into block texts on lines consisting of ``---``."""
    blocks, cur = [], []
    for line in text.splitlines():
        if line.strip() == "---":
            blocks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    blocks.append("\n".join(cur))
    return [b for b in blocks if b.strip()]


def cmd_stream(args) -> int:
    try:
        if not args.blocks or args.blocks == ["-"]:
            texts = split_blocks(sys.stdin.read())
        else:
            texts = [_read(path) for path in args.blocks]
    except OSError as e:
        _err(e)
        return EXIT_INPUT
    blocks = []
    for k, text in enumerate(texts):
        try:
            blocks.append(parse_module(text))
        except ValueError as e:
            _err(f"block {k}: {e}")
            return EXIT_INPUT
    try:
        res = stream_decompose(blocks, args.horizon, _rng(args.seed))
    except StreamError as e:
        _err(e)
        return EXIT_INPUT
    except ValueError as e:
        _err(e)
        return EXIT_INPUT
    v = res.decomposition.module
    print(json.dumps({"p": v.p if blocks else None, "points": v.n_points if blocks else 0,
                      "closed": _bars(res.closed), "open": _bars(res.open)}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intdecomp", description="Interval decomposition of zigzag modules over GF(p).")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="print the barcode of a module file")
    d.add_argument("input", help="module file, or - for stdin")
    d.add_argument("--format", choices=("json", "csv", "ascii"), default="json")
    d.add_argument("--seed", type=int, default=None, help="randomize pivot choices (falls back to $PMOD_SEED)")
    d.add_argument("--check", action="store_true", help="validate the decomposition before printing")
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="check a barcode file against a module file")
    v.add_argument("module")
    v.add_argument("barcode")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("random", help="print a seeded random module file")
    r.add_argument("--points", type=int, default=4)
    r.add_argument("--maxdim", type=int, default=2)
    r.add_argument("--p", type=int, default=2)
    r.add_argument("--seed", type=int, default=None)
    r.set_defaults(func=cmd_random)

    s = sub.add_parser("stream", help="decompose a stream of monotone blocks")
    s.add_argument("blocks", nargs="*", help="block files in order; none or - reads ----separated blocks from stdin")
    s.add_argument("--horizon", type=int, default=None, help="stop after this many blocks")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_stream)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
