"""Sequence, set, and symbol codes, plus inductive-closure derivation checking.

Sequence codes pack Elias-gamma words into one integer: the empty sequence is
0, and a nonempty sequence ``x1..xn`` becomes the integer whose binary digits
are ``1 gamma(x1+1) ... gamma(xn+1)``.  The code of a sequence therefore grows
linearly with the total bit-length of its entries, is injective, and is cheap
to invert.  Naturals whose digits do not parse back into whole gamma words are
not sequence codes; ``decode_seq`` returns ``None`` for them.

Symbol codes follow the fixed table: an n-ary predicate with base code ``c``
gets ``2*[c, n, 0]``, an n-ary function symbol ``2*[c, n, 1]``, a second-order
variable of arity ``k`` and index ``i`` gets ``2*[k, i, 2]``; the connectives
and quantifiers get the odd constants 1, 3, 5, 7, 9, 11, 13 (with 15 reserved
for a grouping symbol that the parenthesis-free serialization never emits),
and the first-order variable ``x_i`` gets ``2*i + 17``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CodeLimitError, SymbolError

# Codes larger than this are rejected; large enough for every sentence the
# workbench materializes, small enough to catch runaway towers.
CODE_LIMIT = 2 ** (2 ** 23)


def _gamma_bits(value: int) -> str:
    # Elias gamma of value >= 1: (L-1) zeros, then the L binary digits.
    b = bin(value)[2:]
    return "0" * (len(b) - 1) + b


def encode_seq(items: Sequence[int], limit: int | None = None) -> int:
    """Code of a finite sequence of naturals; the empty sequence codes to 0."""
    if limit is None:
        limit = CODE_LIMIT
    bits = ["1"]
    total = 1
    for x in items:
        if x < 0:
            raise ValueError(f"sequence entries must be naturals, got {x}")
        w = _gamma_bits(x + 1)
        total += len(w)
        if total > limit.bit_length() + 1:
            raise CodeLimitError(f"sequence code would need {total} bits")
        bits.append(w)
    if len(bits) == 1:
        return 0
    code = int("".join(bits), 2)
    if code > limit:
        raise CodeLimitError(f"sequence code {code.bit_length()} bits exceeds limit")
    return code


def decode_seq(code: int) -> tuple[int, ...] | None:
    """Inverse of encode_seq; ``None`` marks naturals that code no sequence."""
    if code < 0:
        return None
    if code == 0:
        return ()
    bits = bin(code)[2:]
    # bits[0] is the sentinel "1"; the rest must split into whole gamma words.
    pos = 1
    out = []
    n = len(bits)
    while pos < n:
        zeros = 0
        while pos < n and bits[pos] == "0":
            zeros += 1
            pos += 1
        if pos + zeros + 1 > n:
            return None
        value = int(bits[pos : pos + zeros + 1], 2)
        pos += zeros + 1
        out.append(value - 1)
    if not out:
        return None
    return tuple(out)


def is_seq_code(code: int) -> bool:
    return decode_seq(code) is not None


def encode_set(elems: Iterable[int], limit: int | None = None) -> int:
    """Code of a finite set: the sequence code of its ascending enumeration."""
    return encode_seq(sorted(set(elems)), limit=limit)


def pair(a: int, b: int) -> int:
    """Cantor pairing; handy for two-value codes, not used for sequences."""
    return (a + b) * (a + b + 1) // 2 + b


def unpair(p: int) -> tuple[int, int]:
    from math import isqrt

    w = (isqrt(8 * p + 1) - 1) // 2
    t = w * (w + 1) // 2
    b = p - t
    return w - b, b


# Symbol-level codes ---------------------------------------------------------

CONNECTIVE_CODES = {
    "and": 1,
    "or": 3,
    "not": 5,
    "implies": 7,
    "iff": 9,
    "forall": 11,
    "exists": 13,
    "lparen": 15,
}

_CONNECTIVE_BY_CODE = {v: k for k, v in CONNECTIVE_CODES.items()}


@dataclass(frozen=True)
class FoVar:
    """First-order variable x_i, for symbol-coding purposes."""

    index: int


@dataclass(frozen=True)
class SoVar:
    """Second-order variable of the given arity and index."""

    arity: int
    index: int


def predicate_code(base: int, arity: int) -> int:
    return 2 * encode_seq([base, arity, 0])


def function_code(base: int, arity: int) -> int:
    return 2 * encode_seq([base, arity, 1])


def second_order_code(arity: int, index: int) -> int:
    return 2 * encode_seq([arity, index, 2])


def first_order_code(index: int) -> int:
    return 2 * index + 17


def connective_code(name: str) -> int:
    try:
        return CONNECTIVE_CODES[name]
    except KeyError:
        raise SymbolError(f"unknown connective {name!r}") from None


def symbol_code(symbol, coding) -> int:
    """Code of a structure symbol or logical symbol under the given coding.

    ``symbol`` may be a connective/quantifier name, a FoVar, a SoVar, or a
    structure symbol carrying ``name``, ``arity`` and ``is_predicate``;
    structure symbols take their base code from ``coding.base_code``.
    """
    if isinstance(symbol, str):
        return connective_code(symbol)
    if isinstance(symbol, FoVar):
        return first_order_code(symbol.index)
    if isinstance(symbol, SoVar):
        return second_order_code(symbol.arity, symbol.index)
    if hasattr(symbol, "is_predicate"):
        base = coding.base_code(symbol.name)
        if symbol.is_predicate:
            return predicate_code(base, symbol.arity)
        return function_code(base, symbol.arity)
    raise SymbolError(f"cannot code symbol {symbol!r}")


def decode_even_code(code: int) -> tuple[int, int, int] | None:
    """Split an even symbol code into its (first, second, kind) triple."""
    if code % 2 != 0:
        return None
    triple = decode_seq(code // 2)
    if triple is None or len(triple) != 3 or triple[2] not in (0, 1, 2):
        return None
    return triple


def decode_odd_code(code: int):
    """Classify an odd symbol code as a connective name or a FoVar."""
    if code % 2 == 0:
        return None
    if code in _CONNECTIVE_BY_CODE:
        return _CONNECTIVE_BY_CODE[code]
    if code >= 17:
        return FoVar((code - 17) // 2)
    return None


# Inductive-closure derivations ----------------------------------------------

Relation = Callable[[int, int], bool]


def derivation_ok(
    values: Sequence[int],
    base: Callable[[int], bool],
    relations: Sequence[Relation],
    max_select: int = 2,
) -> bool:
    """Check one sequence against the closure clauses.

    Every entry must either satisfy ``base`` or be related, by one of the
    ``relations``, to the code of some selection of up to ``max_select``
    earlier entries (order and repetition allowed, the empty selection too).
    """
    values = list(values)
    if not values:
        return False
    for j, y in enumerate(values):
        if base(y):
            continue
        if not _related_to_earlier(values[:j], y, relations, max_select):
            return False
    return True


def _related_to_earlier(
    earlier: Sequence[int], y: int, relations: Sequence[Relation], max_select: int
) -> bool:
    from itertools import product

    for size in range(max_select + 1):
        for picks in product(range(len(earlier)), repeat=size):
            sel = encode_seq([earlier[i] for i in picks])
            for rel in relations:
                if rel(sel, y):
                    return True
        if not earlier:
            break
    return False


def closure_derivations(
    base: Callable[[int], bool] | set[int],
    relations: Sequence[Relation],
    bound: int,
    max_select: int = 2,
) -> set[int]:
    """All codes <= bound of sequences closed under the derivation clauses."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if isinstance(base, (set, frozenset)):
        members = frozenset(base)
        base_fn = lambda v: v in members  # noqa: E731
    else:
        base_fn = base
    out = set()
    for a in range(bound + 1):
        seq = decode_seq(a)
        if seq is None or not seq:
            continue
        if derivation_ok(seq, base_fn, relations, max_select=max_select):
            out.add(a)
    return out
