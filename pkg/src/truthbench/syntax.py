"""Abstract syntax for first-order arithmetic with free second-order variables.

Formulas are immutable trees over atoms, the connectives ``& | -> <-> !``
(conjunction, disjunction, implication, equivalence, negation, all primitive),
and the quantifiers ``forall``/``exists``.  A formula scheme is a formula some
of whose atoms apply second-order variables ``Y<arity>_<index>``; there is no
second-order quantification.

The concrete grammar (ASCII): first-order variables are ``x0, x1, ...``
(other lowercase identifiers are accepted and assigned high indices in order
of appearance); ``=`` and ``<`` are infix, ``+`` and ``*`` are infix term
operators, decimal literals denote numerals, and any other declared structure
symbol is written applicatively, e.g. ``Prime(7)``.  Quantifiers scope
maximally: ``forall x0. a & b`` binds ``a & b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from . import coding
from .coding import FoVar, SoVar
from .errors import ArityError, ParseError, PreconditionError, SubstitutionError

# AST -------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Apply:
    symbol: str
    args: tuple["Term", ...] = ()


Term = Union[Var, Apply]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class SoAtom:
    """Application of the second-order variable X^arity_index."""

    arity: int
    index: int
    args: tuple[Term, ...]

    def __post_init__(self):
        if len(self.args) != self.arity:
            raise ArityError(
                f"Y{self.arity}_{self.index} applied to {len(self.args)} arguments"
            )


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Binary:
    op: str  # "and" | "or" | "implies" | "iff"
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" | "exists"
    var: int
    body: "Formula"


Formula = Union[Atom, SoAtom, Not, Binary, Quant]

BINARY_OPS = ("and", "or", "implies", "iff")


def land(a: Formula, b: Formula) -> Formula:
    return Binary("and", a, b)


def lor(a: Formula, b: Formula) -> Formula:
    return Binary("or", a, b)


def implies(a: Formula, b: Formula) -> Formula:
    return Binary("implies", a, b)


def iff(a: Formula, b: Formula) -> Formula:
    return Binary("iff", a, b)


def forall(v: int, body: Formula) -> Formula:
    return Quant("forall", v, body)


def exists(v: int, body: Formula) -> Formula:
    return Quant("exists", v, body)


# Numerals ----------------------------------------------------------------

ZERO = Apply("0")
_UNARY_NUMERAL_MAX = 32


def numeral(n: int) -> Term:
    """The canonical closed term of value n.

    Small values are unary successor chains; larger ones use the Horner form
    ``2 * numeral(n // 2) + (n % 2)`` so the term stays logarithmic.
    """
    if n < 0:
        raise ValueError("numerals denote naturals")
    if n <= _UNARY_NUMERAL_MAX:
        t: Term = ZERO
        for _ in range(n):
            t = Apply("S", (t,))
        return t
    q, r = divmod(n, 2)
    two = Apply("S", (Apply("S", (ZERO,)),))
    doubled = Apply("*", (two, numeral(q)))
    return Apply("+", (doubled, numeral(r))) if r else doubled


def numeral_value(t: Term) -> int | None:
    """Value of a canonical numeral term, or ``None`` for any other shape."""
    if isinstance(t, Apply):
        if t.symbol == "0" and not t.args:
            return 0
        if t.symbol == "S" and len(t.args) == 1:
            v = numeral_value(t.args[0])
            if v is None or v >= _UNARY_NUMERAL_MAX:
                return None
            return v + 1
        if t.symbol == "*" and len(t.args) == 2:
            two, q = t.args
            if numeral_value(two) == 2:
                qv = numeral_value(q)
                if qv is not None and 2 * qv > _UNARY_NUMERAL_MAX:
                    return 2 * qv
            return None
        if t.symbol == "+" and len(t.args) == 2:
            d, r = t.args
            dv = numeral_value(d)
            if dv is not None and dv % 2 == 0 and dv > _UNARY_NUMERAL_MAX and numeral_value(r) == 1:
                return dv + 1
            return None
    return None


def is_numeral(t: Term) -> bool:
    return numeral_value(t) is not None


# Traversals ----------------------------------------------------------------


def term_vars(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(phi: Formula) -> set[int]:
    if isinstance(phi, (Atom, SoAtom)):
        out: set[int] = set()
        for t in phi.args:
            out |= term_vars(t)
        return out
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, Binary):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Quant):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(phi)


def all_var_indices(phi: Formula) -> set[int]:
    if isinstance(phi, (Atom, SoAtom)):
        out: set[int] = set()
        for t in phi.args:
            out |= term_vars(t)
        return out
    if isinstance(phi, Not):
        return all_var_indices(phi.body)
    if isinstance(phi, Binary):
        return all_var_indices(phi.left) | all_var_indices(phi.right)
    if isinstance(phi, Quant):
        return all_var_indices(phi.body) | {phi.var}
    raise TypeError(phi)


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def is_scheme(phi: Formula) -> bool:
    return any(True for _ in _so_atoms(phi))


def _so_atoms(phi: Formula) -> Iterator[SoAtom]:
    if isinstance(phi, SoAtom):
        yield phi
    elif isinstance(phi, Not):
        yield from _so_atoms(phi.body)
    elif isinstance(phi, Binary):
        yield from _so_atoms(phi.left)
        yield from _so_atoms(phi.right)
    elif isinstance(phi, Quant):
        yield from _so_atoms(phi.body)


def second_order_signature(phi: Formula) -> tuple[SoVar, ...]:
    """Second-order variables of a scheme, in order of first occurrence."""
    seen: dict[SoVar, None] = {}
    for a in _so_atoms(phi):
        seen.setdefault(SoVar(a.arity, a.index), None)
    return tuple(seen)


def has_quantifier(phi: Formula) -> bool:
    if isinstance(phi, Quant):
        return True
    if isinstance(phi, Not):
        return has_quantifier(phi.body)
    if isinstance(phi, Binary):
        return has_quantifier(phi.left) or has_quantifier(phi.right)
    return False


def function_symbols(phi: Formula) -> set[str]:
    """Names of all function symbols occurring anywhere in the formula."""
    out: set[str] = set()

    def walk_term(t: Term):
        if isinstance(t, Apply):
            out.add(t.symbol)
            for a in t.args:
                walk_term(a)

    def walk(f: Formula):
        if isinstance(f, (Atom, SoAtom)):
            for t in f.args:
                walk_term(t)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, Binary):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quant):
            walk(f.body)

    walk(phi)
    return out


def predicate_symbols(phi: Formula) -> set[str]:
    out: set[str] = set()
    if isinstance(phi, Atom):
        out.add(phi.predicate)
    elif isinstance(phi, Not):
        out |= predicate_symbols(phi.body)
    elif isinstance(phi, Binary):
        out |= predicate_symbols(phi.left) | predicate_symbols(phi.right)
    elif isinstance(phi, Quant):
        out |= predicate_symbols(phi.body)
    return out


# Substitution ----------------------------------------------------------------


def substitute_term_vars(t: Term, env: Mapping[int, Term]) -> Term:
    if isinstance(t, Var):
        return env.get(t.index, t)
    return Apply(t.symbol, tuple(substitute_term_vars(a, env) for a in t.args))


def substitute_vars(phi: Formula, env: Mapping[int, Term]) -> Formula:
    """Simultaneous substitution of terms for free variables, capture-avoiding."""
    if not env:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.predicate, tuple(substitute_term_vars(t, env) for t in phi.args))
    if isinstance(phi, SoAtom):
        return SoAtom(phi.arity, phi.index, tuple(substitute_term_vars(t, env) for t in phi.args))
    if isinstance(phi, Not):
        return Not(substitute_vars(phi.body, env))
    if isinstance(phi, Binary):
        return Binary(phi.op, substitute_vars(phi.left, env), substitute_vars(phi.right, env))
    if isinstance(phi, Quant):
        inner = {k: v for k, v in env.items() if k != phi.var}
        if not inner:
            return phi
        clash = set()
        for v in inner.values():
            clash |= term_vars(v)
        if phi.var in clash:
            fresh = max(all_var_indices(phi) | clash) + 1
            body = substitute_vars(phi.body, {phi.var: Var(fresh)})
            return Quant(phi.kind, fresh, substitute_vars(body, inner))
        return Quant(phi.kind, phi.var, substitute_vars(phi.body, inner))
    raise TypeError(phi)


def instantiate(phi: Formula, var: int, value: int) -> Formula:
    """phi with the numeral of ``value`` substituted for ``var``."""
    return substitute_vars(phi, {var: numeral(value)})


def rename_bound(phi: Formula, avoid: set[int]) -> Formula:
    """Alpha-rename so no binder index occurs in ``avoid`` or twice."""
    counter = [max(all_var_indices(phi) | avoid, default=0) + 1]

    def walk(f: Formula, env: Mapping[int, Term]) -> Formula:
        if isinstance(f, (Atom, SoAtom)):
            return substitute_vars(f, env)
        if isinstance(f, Not):
            return Not(walk(f.body, env))
        if isinstance(f, Binary):
            return Binary(f.op, walk(f.left, env), walk(f.right, env))
        if isinstance(f, Quant):
            fresh = counter[0]
            counter[0] += 1
            env2 = dict(env)
            env2[f.var] = Var(fresh)
            return Quant(f.kind, fresh, walk(f.body, env2))
        raise TypeError(f)

    return walk(phi, {})


Assignment = Mapping[SoVar, Union[str, Formula]]


def substitute_scheme(phi: Formula, assignment: Assignment, structure=None) -> Formula:
    """Replace second-order variables by predicates or formulas.

    A string value names a structure predicate.  A formula value is plugged in
    by the documented convention: its lexicographically first arity-many free
    variables bind positionally to the atom's argument terms, the remaining
    free variables stay as parameters.  Bound variables of the host scheme are
    renamed first so no parameter is captured.
    """
    if not assignment:
        return phi
    avoid: set[int] = set()
    for value in assignment.values():
        if not isinstance(value, str):
            avoid |= free_vars(value)
    host = rename_bound(phi, avoid) if avoid else phi

    def replace(f: Formula) -> Formula:
        if isinstance(f, SoAtom):
            key = SoVar(f.arity, f.index)
            if key not in assignment:
                return f
            value = assignment[key]
            if isinstance(value, str):
                if structure is not None:
                    sym = structure.symbol(value)
                    if not getattr(sym, "is_predicate", True):
                        raise SubstitutionError(f"{value!r} is not a predicate")
                    if sym.arity != f.arity:
                        raise ArityError(
                            f"predicate {value!r} has arity {sym.arity}, variable has {f.arity}"
                        )
                return Atom(value, f.args)
            fv = sorted(free_vars(value))
            if len(fv) < f.arity:
                raise ArityError(
                    f"formula for Y{f.arity}_{f.index} has only {len(fv)} free variables"
                )
            arg_vars: set[int] = set()
            for t in f.args:
                arg_vars |= term_vars(t)
            body = rename_bound(value, arg_vars | set(fv))
            return substitute_vars(body, dict(zip(fv, f.args)))
        if isinstance(f, Atom):
            return f
        if isinstance(f, Not):
            return Not(replace(f.body))
        if isinstance(f, Binary):
            return Binary(f.op, replace(f.left), replace(f.right))
        if isinstance(f, Quant):
            return Quant(f.kind, f.var, replace(f.body))
        raise TypeError(f)

    return replace(host)


# Printing ----------------------------------------------------------------

_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4}
_OP_TEXT = {"and": "&", "or": "|", "implies": "->", "iff": "<->"}


def print_term(t: Term) -> str:
    v = numeral_value(t)
    if v is not None:
        return str(v)
    return _print_term(t, 0)


def _print_term(t: Term, prec: int) -> str:
    v = numeral_value(t)
    if v is not None:
        return str(v)
    if isinstance(t, Var):
        return f"x{t.index}"
    if t.symbol in ("+", "*"):
        own = 1 if t.symbol == "+" else 2
        left = _print_term(t.args[0], own)
        right = _print_term(t.args[1], own + 1)
        s = f"{left} {t.symbol} {right}"
        return f"({s})" if own < prec else s
    if not t.args:
        return t.symbol
    return f"{t.symbol}({', '.join(_print_term(a, 0) for a in t.args)})"


def print_formula(phi: Formula) -> str:
    return _print_formula(phi, 0)


def _print_formula(phi: Formula, prec: int) -> str:
    if isinstance(phi, Atom):
        if phi.predicate in ("=", "<") and len(phi.args) == 2:
            return f"{_print_term(phi.args[0], 0)} {phi.predicate} {_print_term(phi.args[1], 0)}"
        return f"{phi.predicate}({', '.join(_print_term(a, 0) for a in phi.args)})"
    if isinstance(phi, SoAtom):
        return f"Y{phi.arity}_{phi.index}({', '.join(_print_term(a, 0) for a in phi.args)})"
    if isinstance(phi, Not):
        return f"!{_print_formula(phi.body, 5)}"
    if isinstance(phi, Quant):
        s = f"{phi.kind} x{phi.var}. {_print_formula(phi.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(phi, Binary):
        own = _PREC[phi.op]
        if phi.op == "implies":
            s = f"{_print_formula(phi.left, own + 1)} -> {_print_formula(phi.right, own)}"
        else:
            s = f"{_print_formula(phi.left, own)} {_OP_TEXT[phi.op]} {_print_formula(phi.right, own + 1)}"
        return f"({s})" if own < prec else s
    raise TypeError(phi)


# Parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<soatom>Y\d+(?:_\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<num>\d+)|(?P<op><->|->|[&|!()=<,.+*]))"
)
_KEYWORDS = {"forall", "exists"}
_NAMED_VAR_BASE = 1000


class _Parser:
    def __init__(self, text: str, structure):
        self.text = text
        self.structure = structure
        self.tokens: list[tuple[str, str, int]] = []
        self.pos = 0
        self.named_vars: dict[str, int] = {}
        self._tokenize()

    def _tokenize(self):
        i = 0
        while i < len(self.text):
            m = _TOKEN_RE.match(self.text, i)
            if not m or m.end() == i:
                if self.text[i:].strip():
                    raise ParseError(f"unexpected character {self.text[i:].strip()[0]!r}", i)
                break
            i = m.end()
            for kind in ("soatom", "name", "num", "op"):
                tok = m.group(kind)
                if tok is not None:
                    self.tokens.append((kind, tok, m.start(kind)))
                    break

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ("eof", "", len(self.text))

    def take(self, kind=None, value=None):
        k, v, at = self.peek()
        if kind is not None and k != kind or value is not None and v != value:
            want = value or kind
            raise ParseError(f"expected {want!r}, found {v or 'end of input'!r}", at)
        self.pos += 1
        return v, at

    def var_index(self, name: str, at: int) -> int:
        if re.fullmatch(r"x\d+", name):
            return int(name[1:])
        if self.structure is not None and self.structure.has_symbol(name):
            raise ParseError(f"{name!r} is a structure symbol, not a variable", at)
        if name not in self.named_vars:
            self.named_vars[name] = _NAMED_VAR_BASE + len(self.named_vars)
        return self.named_vars[name]

    def is_symbol(self, name: str) -> bool:
        if re.fullmatch(r"x\d+", name) or name in _KEYWORDS:
            return False
        if self.structure is not None:
            return self.structure.has_symbol(name)
        return name in ("S", "0", "+", "*")

    def parse_formula(self) -> Formula:
        left = self.parse_implies()
        while self.peek()[1] == "<->":
            self.take()
            left = Binary("iff", left, self.parse_implies())
        return left

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek()[1] == "->":
            self.take()
            return Binary("implies", left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek()[1] == "|":
            self.take()
            left = Binary("or", left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.peek()[1] == "&":
            self.take()
            left = Binary("and", left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        k, v, at = self.peek()
        if v == "!":
            self.take()
            return Not(self.parse_unary())
        if k == "name" and v in _KEYWORDS:
            self.take()
            name, vat = self.take("name")
            idx = self.var_index(name, vat)
            self.take("op", ".")
            return Quant(v, idx, self.parse_formula())
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        k, v, at = self.peek()
        if k == "soatom":
            self.take()
            arity_s, _, index_s = v[1:].partition("_")
            arity, index = int(arity_s), int(index_s or 0)
            self.take("op", "(")
            args = self.parse_term_list()
            self.take("op", ")")
            if len(args) != arity:
                raise ParseError(f"{v} expects {arity} arguments, got {len(args)}", at)
            return SoAtom(arity, index, tuple(args))
        if v == "(":
            save = self.pos
            try:
                self.take()
                phi = self.parse_formula()
                self.take("op", ")")
                return phi
            except ParseError:
                self.pos = save
                return self.parse_relational()
        if k == "name" and self.is_symbol(v) and self._symbol_is_predicate(v):
            self.take()
            self.take("op", "(")
            args = self.parse_term_list()
            self.take("op", ")")
            return Atom(v, tuple(args))
        return self.parse_relational()

    def _symbol_is_predicate(self, name: str) -> bool:
        if self.structure is None:
            return False
        sym = self.structure.symbol(name)
        return bool(getattr(sym, "is_predicate", False)) and name not in ("=", "<")

    def parse_relational(self) -> Formula:
        left = self.parse_term()
        op, at = self.take("op")
        if op not in ("=", "<"):
            raise ParseError(f"expected '=' or '<', found {op!r}", at)
        right = self.parse_term()
        return Atom(op, (left, right))

    def parse_term_list(self) -> list[Term]:
        args = [self.parse_term()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.parse_term())
        return args

    def parse_term(self) -> Term:
        left = self.parse_term_mul()
        while self.peek()[1] == "+":
            self.take()
            left = Apply("+", (left, self.parse_term_mul()))
        return left

    def parse_term_mul(self) -> Term:
        left = self.parse_term_prim()
        while self.peek()[1] == "*":
            self.take()
            left = Apply("*", (left, self.parse_term_prim()))
        return left

    def parse_term_prim(self) -> Term:
        k, v, at = self.peek()
        if v == "(":
            self.take()
            t = self.parse_term()
            self.take("op", ")")
            return t
        if k == "num":
            self.take()
            return numeral(int(v))
        if k == "name":
            self.take()
            if self.is_symbol(v):
                if self.peek()[1] == "(":
                    self.take()
                    args = self.parse_term_list()
                    self.take("op", ")")
                    return Apply(v, tuple(args))
                return Apply(v, ())
            return Var(self.var_index(v, at))
        raise ParseError(f"expected a term, found {v or 'end of input'!r}", at)


def parse(text: str, structure=None) -> Formula:
    """Parse formula text; symbol names resolve against ``structure`` if given."""
    p = _Parser(text, structure)
    phi = p.parse_formula()
    k, v, at = p.peek()
    if k != "eof":
        raise ParseError(f"trailing input {v!r}", at)
    return phi


# JSON AST ----------------------------------------------------------------


def term_to_json(t: Term) -> dict:
    if isinstance(t, Var):
        return {"node": "var", "index": t.index}
    return {"node": "apply", "symbol": t.symbol, "args": [term_to_json(a) for a in t.args]}


def term_from_json(d: dict) -> Term:
    if d["node"] == "var":
        return Var(d["index"])
    if d["node"] == "apply":
        return Apply(d["symbol"], tuple(term_from_json(a) for a in d["args"]))
    raise ValueError(f"bad term node {d!r}")


def to_json(phi: Formula) -> dict:
    if isinstance(phi, Atom):
        return {"node": "atom", "predicate": phi.predicate, "args": [term_to_json(t) for t in phi.args]}
    if isinstance(phi, SoAtom):
        return {
            "node": "soatom",
            "arity": phi.arity,
            "index": phi.index,
            "args": [term_to_json(t) for t in phi.args],
        }
    if isinstance(phi, Not):
        return {"node": "not", "body": to_json(phi.body)}
    if isinstance(phi, Binary):
        return {"node": phi.op, "left": to_json(phi.left), "right": to_json(phi.right)}
    if isinstance(phi, Quant):
        return {"node": phi.kind, "var": phi.var, "body": to_json(phi.body)}
    raise TypeError(phi)


def from_json(d: dict) -> Formula:
    node = d["node"]
    if node == "atom":
        return Atom(d["predicate"], tuple(term_from_json(a) for a in d["args"]))
    if node == "soatom":
        return SoAtom(d["arity"], d["index"], tuple(term_from_json(a) for a in d["args"]))
    if node == "not":
        return Not(from_json(d["body"]))
    if node in BINARY_OPS:
        return Binary(node, from_json(d["left"]), from_json(d["right"]))
    if node in ("forall", "exists"):
        return Quant(node, d["var"], from_json(d["body"]))
    raise ValueError(f"bad formula node {node!r}")


# Prenex form ----------------------------------------------------------------


@dataclass(frozen=True)
class PrenexForm:
    """Quantifier prefix plus a quantifier-free matrix."""

    prefix: tuple[tuple[str, int], ...]
    matrix: Formula

    def __post_init__(self):
        if has_quantifier(self.matrix):
            raise ValueError("prenex matrix must be quantifier-free")
        seen = [v for _, v in self.prefix]
        if len(seen) != len(set(seen)):
            raise ValueError("prenex prefix variables must be distinct")

    def to_formula(self) -> Formula:
        phi = self.matrix
        for kind, var in reversed(self.prefix):
            phi = Quant(kind, var, phi)
        return phi


def split_prenex(phi: Formula) -> PrenexForm:
    """Strictly peel the prefix of an already-prenex formula; error otherwise."""
    prefix: list[tuple[str, int]] = []
    while isinstance(phi, Quant):
        prefix.append((phi.kind, phi.var))
        phi = phi.body
    if has_quantifier(phi):
        raise PreconditionError("formula is not in prenex form")
    return PrenexForm(tuple(prefix), phi)


def _expand_quantified_iff(phi: Formula) -> Formula:
    if isinstance(phi, (Atom, SoAtom)):
        return phi
    if isinstance(phi, Not):
        return Not(_expand_quantified_iff(phi.body))
    if isinstance(phi, Quant):
        return Quant(phi.kind, phi.var, _expand_quantified_iff(phi.body))
    left = _expand_quantified_iff(phi.left)
    right = _expand_quantified_iff(phi.right)
    if phi.op == "iff" and (has_quantifier(left) or has_quantifier(right)):
        return Binary("and", Binary("implies", left, right), Binary("implies", right, left))
    return Binary(phi.op, left, right)


def to_prenex(phi: Formula) -> PrenexForm:
    """Classically equivalent prenex form.

    Equivalences whose operands contain quantifiers are first unfolded into a
    pair of implications; everything else keeps its primitive connectives.
    Bound variables are renamed apart, so prefix variables are distinct.
    """
    expanded = _expand_quantified_iff(phi)
    renamed = rename_bound(expanded, free_vars(expanded))

    def pull(f: Formula) -> tuple[list[tuple[str, int]], Formula]:
        if isinstance(f, (Atom, SoAtom)):
            return [], f
        if isinstance(f, Not):
            p, m = pull(f.body)
            return [(_dual(k), v) for k, v in p], Not(m)
        if isinstance(f, Quant):
            p, m = pull(f.body)
            return [(f.kind, f.var)] + p, m
        if isinstance(f, Binary):
            pl, ml = pull(f.left)
            pr, mr = pull(f.right)
            if f.op == "implies":
                pl = [(_dual(k), v) for k, v in pl]
            return pl + pr, Binary(f.op, ml, mr)
        raise TypeError(f)

    prefix, matrix = pull(renamed)
    return PrenexForm(tuple(prefix), matrix)


def _dual(kind: str) -> str:
    return "exists" if kind == "forall" else "forall"


# Skolem formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class SkolemForm:
    """Skolem formula of a closed prenex scheme, with its fresh variables.

    ``h_vars[i]`` is the fresh second-order variable guarding the i-th
    existential prefix variable (in prefix order); its arguments are the
    variables of the universal block immediately preceding that existential
    block, followed by the existential variable itself.
    """

    formula: Formula
    h_vars: tuple[SoVar, ...]
    h_args: tuple[tuple[int, ...], ...]
    matrix: Formula
    prefix: tuple[tuple[str, int], ...]


def skolem_decomposition(psi: PrenexForm | Formula) -> SkolemForm:
    if not isinstance(psi, PrenexForm):
        psi = split_prenex(psi)
    base = psi.to_formula()
    if free_vars(base):
        raise PreconditionError("Skolem construction needs a closed scheme")
    used = [sv.index for sv in second_order_signature(base)]
    next_index = max(used, default=-1) + 1

    h_vars: list[SoVar] = []
    h_args: list[tuple[int, ...]] = []
    atoms: list[Formula] = []
    current_universals: list[int] = []
    last_kind = None
    for kind, var in psi.prefix:
        if kind == "forall":
            if last_kind != "forall":
                current_universals = []
            current_universals.append(var)
        else:
            sv = SoVar(len(current_universals) + 1, next_index)
            next_index += 1
            args = tuple(current_universals) + (var,)
            h_vars.append(sv)
            h_args.append(args)
            atoms.append(SoAtom(sv.arity, sv.index, tuple(Var(v) for v in args)))
        last_kind = kind

    if not atoms:
        formula = psi.matrix
    else:
        antecedent = atoms[0]
        for a in atoms[1:]:
            antecedent = Binary("and", antecedent, a)
        formula = Binary("implies", antecedent, psi.matrix)
    return SkolemForm(formula, tuple(h_vars), tuple(h_args), psi.matrix, psi.prefix)


def skolem_formula(psi: PrenexForm | Formula) -> Formula:
    """The open implication guarding each existential by a fresh Skolem graph."""
    return skolem_decomposition(psi).formula


# Godel numbering ----------------------------------------------------------------


def polish_symbols(phi: Formula):
    """Parenthesis-free serialization as a list of coding-level symbols."""
    out: list = []

    def term(t: Term):
        if isinstance(t, Var):
            out.append(FoVar(t.index))
        else:
            out.append(("sym", t.symbol))
            for a in t.args:
                term(a)

    def walk(f: Formula):
        if isinstance(f, Atom):
            out.append(("sym", f.predicate))
            for t in f.args:
                term(t)
        elif isinstance(f, SoAtom):
            out.append(SoVar(f.arity, f.index))
            for t in f.args:
                term(t)
        elif isinstance(f, Not):
            out.append("not")
            walk(f.body)
        elif isinstance(f, Binary):
            out.append(f.op)
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quant):
            out.append(f.kind)
            out.append(FoVar(f.var))
            walk(f.body)
        else:
            raise TypeError(f)

    walk(phi)
    return out


def size(phi: Formula) -> int:
    """Symbol count of the Polish serialization."""
    return len(polish_symbols(phi))


def godel_number(phi: Formula, c) -> int:
    """Sequence code of the symbol-code sequence of phi's serialization."""
    codes = []
    for tok in polish_symbols(phi):
        if isinstance(tok, tuple):
            codes.append(coding.symbol_code(c.structure.symbol(tok[1]), c))
        else:
            codes.append(coding.symbol_code(tok, c))
    return coding.encode_seq(codes)


def decode_godel(number: int, c) -> Formula | None:
    """Formula whose serialization codes to ``number``, or ``None``."""
    seq = coding.decode_seq(number)
    if seq is None or not seq:
        return None
    try:
        phi, pos = _parse_polish_formula(list(seq), 0, c)
    except (_PolishError, ArityError):
        return None
    if pos != len(seq):
        return None
    return phi


class _PolishError(Exception):
    pass


def _parse_polish_formula(codes: list[int], pos: int, c) -> tuple[Formula, int]:
    if pos >= len(codes):
        raise _PolishError("truncated")
    head = codes[pos]
    odd = coding.decode_odd_code(head)
    if odd == "not":
        body, pos = _parse_polish_formula(codes, pos + 1, c)
        return Not(body), pos
    if odd in BINARY_OPS:
        left, pos = _parse_polish_formula(codes, pos + 1, c)
        right, pos = _parse_polish_formula(codes, pos, c)
        return Binary(odd, left, right), pos
    if odd in ("forall", "exists"):
        if pos + 1 >= len(codes):
            raise _PolishError("truncated quantifier")
        var = coding.decode_odd_code(codes[pos + 1])
        if not isinstance(var, FoVar):
            raise _PolishError("quantifier not followed by a variable")
        body, pos = _parse_polish_formula(codes, pos + 2, c)
        return Quant(odd, var.index, body), pos
    triple = coding.decode_even_code(head)
    if triple is not None:
        first, second, kind = triple
        if kind == 2:
            args = []
            pos += 1
            for _ in range(first):
                t, pos = _parse_polish_term(codes, pos, c)
                args.append(t)
            return SoAtom(first, second, tuple(args)), pos
        if kind == 0:
            name = c.predicate_name(first, second)
            if name is None:
                raise _PolishError("unknown predicate code")
            args = []
            pos += 1
            for _ in range(second):
                t, pos = _parse_polish_term(codes, pos, c)
                args.append(t)
            return Atom(name, tuple(args)), pos
    raise _PolishError("not a formula head")


def _parse_polish_term(codes: list[int], pos: int, c) -> tuple[Term, int]:
    if pos >= len(codes):
        raise _PolishError("truncated term")
    head = codes[pos]
    odd = coding.decode_odd_code(head)
    if isinstance(odd, FoVar):
        return Var(odd.index), pos + 1
    triple = coding.decode_even_code(head)
    if triple is not None and triple[2] == 1:
        name = c.function_name(triple[0], triple[1])
        if name is None:
            raise _PolishError("unknown function code")
        args = []
        pos += 1
        for _ in range(triple[1]):
            t, pos = _parse_polish_term(codes, pos, c)
            args.append(t)
        return Apply(name, tuple(args)), pos
    raise _PolishError("not a term head")
