"""Structures as finite families of computably presented symbols over omega.

A structure is an ordered, name-unique collection of predicate and function
symbols whose extensions are total procedures; it always contains the base
arithmetic ``=, <, S, +, *`` plus the zero constant ``0`` (numerals, closed
terms, and hence sentences need a constant to exist at all).  A magnitude
bound caps every function argument and result; exceeding it raises rather
than wrapping.

Predicate extensions may return ``True``/``False`` or ``None`` for "unknown
at this point"; partial rows of iterated truth predicates use the latter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import coding
from .errors import ArityError, BoundError, SymbolError

DEFAULT_BOUND = 2 ** 16


@dataclass(frozen=True)
class PredicateSym:
    name: str
    arity: int
    extension: Callable

    is_predicate = True

    def __post_init__(self):
        if self.arity < 1:
            raise ArityError(f"predicate {self.name!r} needs arity >= 1")

    def query(self, args: Sequence[int]) -> bool | None:
        if len(args) != self.arity:
            raise ArityError(f"{self.name!r} expects {self.arity} arguments")
        return self.extension(*args)


@dataclass(frozen=True)
class FunctionSym:
    name: str
    arity: int
    extension: Callable | int

    is_predicate = False

    def __post_init__(self):
        if self.arity < 0:
            raise ArityError(f"function {self.name!r} needs arity >= 0")
        if self.arity == 0 and not isinstance(self.extension, int):
            raise ArityError(f"constant {self.name!r} needs an integer extension")

    def value(self, args: Sequence[int], bound: int) -> int:
        if len(args) != self.arity:
            raise ArityError(f"{self.name!r} expects {self.arity} arguments")
        for a in args:
            if a > bound:
                raise BoundError(f"argument {a} to {self.name!r} exceeds bound {bound}")
        result = self.extension if self.arity == 0 else self.extension(*args)
        if result < 0 or result > bound:
            raise BoundError(f"{self.name!r}{tuple(args)} = {result} exceeds bound {bound}")
        return result


Symbol = PredicateSym | FunctionSym


class Structure:
    """Immutable named family of interpreted symbols containing arithmetic."""

    def __init__(self, symbols: Iterable[Symbol], bound: int = DEFAULT_BOUND, check_base: bool = True):
        self.symbols: tuple[Symbol, ...] = tuple(symbols)
        self.bound = bound
        self._by_name = {}
        for s in self.symbols:
            if s.name in self._by_name:
                raise SymbolError(f"duplicate symbol name {s.name!r}")
            self._by_name[s.name] = s
        if check_base:
            for name in ("=", "<", "S", "+", "*", "0"):
                if name not in self._by_name:
                    raise SymbolError(f"structure lacks base-arithmetic symbol {name!r}")

    def has_symbol(self, name: str) -> bool:
        return name in self._by_name

    def symbol(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise SymbolError(f"unknown symbol {name!r}") from None

    def predicates(self) -> tuple[PredicateSym, ...]:
        return tuple(s for s in self.symbols if s.is_predicate)

    def functions(self) -> tuple[FunctionSym, ...]:
        return tuple(s for s in self.symbols if not s.is_predicate)

    def with_bound(self, bound: int) -> "Structure":
        return Structure(self.symbols, bound=bound)

    def __repr__(self):
        return f"Structure({', '.join(s.name for s in self.symbols)})"


def base_arithmetic(bound: int = DEFAULT_BOUND) -> Structure:
    """The arithmetic {=, <, S, +, *} with the zero constant, over omega."""
    return Structure(
        [
            PredicateSym("=", 2, lambda a, b: a == b),
            PredicateSym("<", 2, lambda a, b: a < b),
            FunctionSym("S", 1, lambda a: a + 1),
            FunctionSym("+", 2, lambda a, b: a + b),
            FunctionSym("*", 2, lambda a, b: a * b),
            FunctionSym("0", 0, 0),
        ],
        bound=bound,
    )


def extend(m: Structure, new_symbols: Iterable[Symbol]) -> Structure:
    """The structure M + Y; duplicate names are an error."""
    return Structure(m.symbols + tuple(new_symbols), bound=m.bound)


# Named builtin extensions for description files and tests.


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


BUILTIN_PREDICATES: dict[str, tuple[int, Callable]] = {
    "primality": (1, _is_prime),
    "divisibility": (2, lambda a, b: a != 0 and b % a == 0),
    "even": (1, lambda a: a % 2 == 0),
    "comparison": (2, lambda a, b: a <= b),
}

BUILTIN_FUNCTIONS: dict[str, tuple[int, Callable | int]] = {
    "successor": (1, lambda a: a + 1),
    "plus": (2, lambda a, b: a + b),
    "times": (2, lambda a, b: a * b),
    "double": (1, lambda a: 2 * a),
    "zero": (0, 0),
}


def symbol_from_description(desc: dict) -> Symbol:
    """Build one symbol from a JSON description entry."""
    name = desc["name"]
    kind = desc["kind"]
    if "builtin" in desc:
        table = BUILTIN_PREDICATES if kind == "predicate" else BUILTIN_FUNCTIONS
        try:
            arity, ext = table[desc["builtin"]]
        except KeyError:
            raise SymbolError(f"unknown builtin {desc['builtin']!r}") from None
        if "arity" in desc and desc["arity"] != arity:
            raise ArityError(f"builtin {desc['builtin']!r} has arity {arity}")
        return PredicateSym(name, arity, ext) if kind == "predicate" else FunctionSym(name, arity, ext)
    arity = desc["arity"]
    if kind == "predicate":
        support = {tuple(e) for e in desc["table"]["entries"]}
        default = bool(desc["table"].get("default", False))
        ext = (lambda *args: not (tuple(args) in support)) if default else (lambda *args: tuple(args) in support)
        return PredicateSym(name, arity, ext)
    if kind == "function":
        mapping = {tuple(e[:-1]): e[-1] for e in desc["table"]["entries"]}
        default = int(desc["table"].get("default", 0))
        if arity == 0:
            return FunctionSym(name, 0, default)
        ext = lambda *args, _m=mapping, _d=default: _m.get(tuple(args), _d)  # noqa: E731
        return FunctionSym(name, arity, ext)
    raise SymbolError(f"unknown symbol kind {kind!r}")


def structure_from_description(desc: dict) -> Structure:
    """Structure from a JSON description: base arithmetic plus listed symbols."""
    bound = desc.get("bound", DEFAULT_BOUND)
    return extend(base_arithmetic(bound=bound), [symbol_from_description(d) for d in desc.get("symbols", [])])


def load_structure(path: str) -> Structure:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_description(json.load(fh))


# Codings ----------------------------------------------------------------


@dataclass(frozen=True)
class Coding:
    """Injective base-code assignment for a structure's symbols."""

    structure: Structure
    base: dict[str, int] = field(compare=False)

    def __post_init__(self):
        values = list(self.base.values())
        if len(set(values)) != len(values):
            raise SymbolError("coding is not injective")
        for s in self.structure.symbols:
            if s.name not in self.base:
                raise SymbolError(f"coding misses symbol {s.name!r}")

    def base_code(self, name: str) -> int:
        try:
            return self.base[name]
        except KeyError:
            raise SymbolError(f"symbol {name!r} outside the coding's domain") from None

    def extended_code(self, name: str) -> int:
        """c-bar of a structure symbol."""
        return coding.symbol_code(self.structure.symbol(name), self)

    def symbol_by_extended_code(self, code: int) -> Symbol | None:
        return self._extended_map().get(code)

    def predicate_name(self, base: int, arity: int) -> str | None:
        sym = self._base_map().get(base)
        if sym is not None and sym.is_predicate and sym.arity == arity:
            return sym.name
        return None

    def function_name(self, base: int, arity: int) -> str | None:
        sym = self._base_map().get(base)
        if sym is not None and not sym.is_predicate and sym.arity == arity:
            return sym.name
        return None

    def _base_map(self) -> dict[int, Symbol]:
        cached = getattr(self, "_base_map_cache", None)
        if cached is None:
            cached = {self.base[s.name]: s for s in self.structure.symbols}
            object.__setattr__(self, "_base_map_cache", cached)
        return cached

    def _extended_map(self) -> dict[int, Symbol]:
        cached = getattr(self, "_ext_map_cache", None)
        if cached is None:
            cached = {self.extended_code(s.name): s for s in self.structure.symbols}
            object.__setattr__(self, "_ext_map_cache", cached)
        return cached


def default_coding(m: Structure, overrides: dict[str, int] | None = None) -> Coding:
    """Symbol-table enumeration order coding, user-overridable per symbol."""
    base = {s.name: i for i, s in enumerate(m.symbols)}
    if overrides:
        base.update(overrides)
    return Coding(m, base)


# Derived relations ----------------------------------------------------------------


class DRelation:
    """Membership relation exposing each symbol's extension by its code.

    The row at the extended code of an n-ary predicate holds the sequence
    codes of its extension tuples; the row at an n-ary function symbol holds
    the codes of its (n+1)-tuple graph entries; every other row is {1}.
    """

    def __init__(self, m: Structure, c: Coding):
        self.structure = m
        self.coding = c

    def query(self, x: int, y: int) -> bool:
        sym = self.coding.symbol_by_extended_code(x)
        if sym is None:
            return y == 1
        seq = coding.decode_seq(y)
        if seq is None:
            return False
        if sym.is_predicate:
            if len(seq) != sym.arity:
                return False
            return bool(sym.query(seq))
        if len(seq) != sym.arity + 1:
            return False
        try:
            return sym.value(seq[: sym.arity], self.structure.bound) == seq[-1]
        except BoundError:
            return False

    __call__ = query


def d_relation(m: Structure, c: Coding) -> DRelation:
    return DRelation(m, c)


class ValRelation:
    """Graph of closed-term evaluation: holds on (a, b) iff a codes a closed
    term of the structure whose value is b."""

    def __init__(self, m: Structure, c: Coding):
        self.structure = m
        self.coding = c

    def term_value_of_code(self, a: int) -> int | None:
        from . import syntax

        seq = coding.decode_seq(a)
        if seq is None or not seq:
            return None
        try:
            term, pos = syntax._parse_polish_term(list(seq), 0, self.coding)
        except syntax._PolishError:
            return None
        if pos != len(seq) or syntax.term_vars(term):
            return None
        from .evaluation import term_value

        try:
            return term_value(self.structure, term)
        except BoundError:
            return None

    def query(self, a: int, b: int) -> bool:
        return self.term_value_of_code(a) == b

    __call__ = query


def val_relation(m: Structure, c: Coding) -> ValRelation:
    return ValRelation(m, c)
