"""Linear orders on omega, ordinal notations below w^w, and representations.

A linear order is presented by a decidable membership test, a restartable
enumerator (the probe's arrival order), and a total non-strict comparison on
domain pairs.  A representation is a linear order certified by construction
to realize a Cantor-normal-form notation: its elements are the sequence codes
of fixed-length digit vectors, compared lexicographically, so the beta-th
element and the index of an element are both directly computable.

Exact well-ordered parts are uncomputable; ``wo_probe`` is the documented
desk-scale shadow.  Within the inspected prefix it hunts chains that descend
in the order while arriving later and later through the enumerator: an
ill-founded tail keeps undercutting itself forever and gets flagged, while a
finite order (exhausted enumerator) is well-founded outright.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from . import coding
from .errors import NotationError, PreconditionError
from .structures import Coding, Structure

# Notations ----------------------------------------------------------------


@dataclass(frozen=True, order=False)
class OrdinalNotation:
    """Cantor normal form below w^w: strictly decreasing exponents, coeffs >= 1."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if exps != sorted(exps, reverse=True) or len(set(exps)) != len(exps):
            raise NotationError("exponents must strictly decrease")
        if any(c < 1 for _, c in self.terms) or any(e < 0 for e, _ in self.terms):
            raise NotationError("coefficients must be >= 1 and exponents >= 0")

    # -- construction

    @staticmethod
    def from_int(n: int) -> "OrdinalNotation":
        if n < 0:
            raise NotationError("ordinals are not negative")
        return OrdinalNotation(((0, n),) if n else ())

    @staticmethod
    def omega(power: int = 1, coeff: int = 1) -> "OrdinalNotation":
        return OrdinalNotation(((power, coeff),))

    @staticmethod
    def parse(text: str) -> "OrdinalNotation":
        """Parse literals like ``w^2*3+w*1+4``, ``w*2``, ``w``, ``17``, ``0``."""
        text = text.replace(" ", "")
        if text == "0":
            return OrdinalNotation()
        terms = []
        for part in text.split("+"):
            m = re.fullmatch(r"w(?:\^(\d+))?(?:\*(\d+))?", part)
            if m:
                exp = int(m.group(1) or 1)
                coeff = int(m.group(2) or 1)
                terms.append((exp, coeff))
                continue
            if re.fullmatch(r"\d+", part):
                terms.append((0, int(part)))
                continue
            raise NotationError(f"bad notation component {part!r}")
        return OrdinalNotation(tuple(terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            elif e == 1:
                parts.append(f"w*{c}" if c != 1 else "w")
            else:
                parts.append(f"w^{e}*{c}" if c != 1 else f"w^{e}")
        return "+".join(parts)

    # -- observations

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or self.terms[0][0] == 0

    def as_int(self) -> int:
        if not self.is_finite:
            raise NotationError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def leading_exp(self) -> int:
        if not self.terms:
            raise NotationError("0 has no leading exponent")
        return self.terms[0][0]

    def _key(self):
        return self.terms

    def __lt__(self, other: "OrdinalNotation") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "OrdinalNotation") -> bool:
        return self == other or self < other

    # -- arithmetic

    def add(self, other: "OrdinalNotation") -> "OrdinalNotation":
        if other.is_zero:
            return self
        cut = other.terms[0][0]
        kept = [t for t in self.terms if t[0] > cut]
        merged = list(other.terms)
        boundary = [c for e, c in self.terms if e == cut]
        if boundary:
            merged[0] = (cut, boundary[0] + merged[0][1])
        return OrdinalNotation(tuple(kept + merged))

    def mul(self, other: "OrdinalNotation") -> "OrdinalNotation":
        if self.is_zero or other.is_zero:
            return OrdinalNotation()
        total = OrdinalNotation()
        for e, c in other.terms:
            if e > 0:
                piece = OrdinalNotation(((self.leading_exp + e, c),))
            else:
                lead_e, lead_c = self.terms[0]
                piece = OrdinalNotation(((lead_e, lead_c * c),) + self.terms[1:])
            total = total.add(piece)
        return total

    def successor(self) -> "OrdinalNotation":
        return self.add(OrdinalNotation.from_int(1))


# Linear orders ----------------------------------------------------------------


@dataclass
class LinearOrder:
    """Decidable non-strict linear order with a restartable enumerator."""

    member: Callable[[int], bool]
    leq: Callable[[int, int], bool]
    enumerate: Callable[[], Iterator[int]] = field(repr=False)
    name: str = "order"

    def less(self, x: int, y: int) -> bool:
        return x != y and self.leq(x, y)


def natural_order(limit: int | None = None) -> LinearOrder:
    def enum():
        return iter(range(limit)) if limit is not None else itertools.count()

    member = (lambda x: 0 <= x < limit) if limit is not None else (lambda x: x >= 0)
    return LinearOrder(member, lambda a, b: a <= b, enum, name=f"natural[{limit}]")


def omega_plus_omega_star() -> LinearOrder:
    """Evens ascending below all odds, odds descending: wo part = the evens."""

    def leq(a: int, b: int) -> bool:
        if a % 2 == 0 and b % 2 == 0:
            return a <= b
        if a % 2 == 1 and b % 2 == 1:
            return a >= b
        return a % 2 == 0

    return LinearOrder(lambda x: x >= 0, leq, lambda: itertools.count(), name="w+w*")


def sum_order(first: LinearOrder, second: LinearOrder) -> LinearOrder:
    """Order of type |first| + |second| on tagged elements 2x / 2x+1."""

    def member(z: int) -> bool:
        return first.member(z // 2) if z % 2 == 0 else second.member(z // 2)

    def leq(a: int, b: int) -> bool:
        if a % 2 == b % 2:
            side = first if a % 2 == 0 else second
            return side.leq(a // 2, b // 2)
        return a % 2 == 0

    def enum():
        firsts = (2 * x for x in first.enumerate())
        seconds = (2 * x + 1 for x in second.enumerate())
        return _interleave(firsts, seconds)

    return LinearOrder(member, leq, enum, name=f"{first.name}+{second.name}")


def product_order(first: LinearOrder, second: LinearOrder) -> LinearOrder:
    """Order of type |first| * |second|: pairs compared second-major."""

    def member(z: int) -> bool:
        a, b = coding.unpair(z)
        return first.member(a) and second.member(b)

    def leq(za: int, zb: int) -> bool:
        a1, b1 = coding.unpair(za)
        a2, b2 = coding.unpair(zb)
        if b1 == b2:
            return first.leq(a1, a2)
        return second.less(b1, b2)

    def enum():
        return (z for z in itertools.count() if member(z))

    return LinearOrder(member, leq, enum, name=f"{first.name}*{second.name}")


def _interleave(*iters: Iterator[int]) -> Iterator[int]:
    pending = list(iters)
    while pending:
        nxt = []
        for it in pending:
            try:
                yield next(it)
                nxt.append(it)
            except StopIteration:
                pass
        pending = nxt


# Representations ----------------------------------------------------------------


@dataclass
class Representation(LinearOrder):
    """Linear order certified to realize ``notation`` by the digit construction.

    Elements are sequence codes of digit vectors of fixed length; the vector
    of beta < alpha lists beta's CNF coefficients from the leading exponent
    of alpha down to exponent zero, and comparison is lexicographic.
    """

    notation: OrdinalNotation = OrdinalNotation()
    length: int = 1
    limit_digits: tuple[int, ...] = ()

    def digits_of(self, beta: OrdinalNotation) -> tuple[int, ...]:
        if any(e >= self.length for e, _ in beta.terms):
            raise NotationError(f"{beta} does not fit in {self.length} digits")
        by_exp = dict(beta.terms)
        return tuple(by_exp.get(self.length - 1 - i, 0) for i in range(self.length))

    def notation_of(self, digits: tuple[int, ...]) -> OrdinalNotation:
        terms = [
            (self.length - 1 - i, d) for i, d in enumerate(digits) if d > 0
        ]
        return OrdinalNotation(tuple(terms))

    def element_at(self, beta: OrdinalNotation) -> int | None:
        """rho_beta: the beta-th element, None from the order type upward."""
        if not beta < self.notation:
            return None
        return coding.encode_seq(self.digits_of(beta))

    def index_of(self, x: int) -> OrdinalNotation | None:
        digits = coding.decode_seq(x)
        if digits is None or len(digits) != self.length:
            return None
        if not digits < self.limit_digits:
            return None
        return self.notation_of(digits)


def canonical_representation(alpha: OrdinalNotation) -> Representation:
    """Decidable well-order of type alpha on digit-vector codes."""
    if alpha.is_zero:
        empty = Representation(
            member=lambda x: False,
            leq=lambda a, b: False,
            enumerate=lambda: iter(()),
            name="rep[0]",
            notation=alpha,
            length=1,
            limit_digits=(0,),
        )
        return empty
    length = alpha.leading_exp + 1
    by_exp = dict(alpha.terms)
    limit = tuple(by_exp.get(length - 1 - i, 0) for i in range(length))

    def decode(x: int) -> tuple[int, ...] | None:
        digits = coding.decode_seq(x)
        if digits is None or len(digits) != length or not digits < limit:
            return None
        return digits

    def member(x: int) -> bool:
        return decode(x) is not None

    def leq(a: int, b: int) -> bool:
        da, db = decode(a), decode(b)
        if da is None or db is None:
            return False
        return da <= db

    total = alpha.as_int() if alpha.is_finite else None

    def enum() -> Iterator[int]:
        found = 0
        for x in itertools.count():
            if total is not None and found >= total:
                return
            if member(x):
                found += 1
                yield x

    return Representation(
        member=member,
        leq=leq,
        enumerate=enum,
        name=f"rep[{alpha}]",
        notation=alpha,
        length=length,
        limit_digits=limit,
    )


def rho_beta(r: Representation, beta: OrdinalNotation) -> int | None:
    """The beta-th element of the transfinite enumeration of r."""
    return r.element_at(beta)


def restrict(r: Representation, beta: OrdinalNotation) -> Representation:
    """r restricted to its first beta elements; a representation of beta."""
    if not beta <= r.notation:
        raise PreconditionError(f"{beta} exceeds the order type {r.notation}")
    if beta == r.notation:
        return r
    limit = r.digits_of(beta)
    length = r.length

    def decode(x: int) -> tuple[int, ...] | None:
        digits = coding.decode_seq(x)
        if digits is None or len(digits) != length or not digits < limit:
            return None
        return digits

    member = lambda x: decode(x) is not None  # noqa: E731

    def leq(a, b):
        da, db = decode(a), decode(b)
        if da is None or db is None:
            return False
        return da <= db

    total = beta.as_int() if beta.is_finite else None

    def enum() -> Iterator[int]:
        found = 0
        for x in itertools.count():
            if total is not None and found >= total:
                return
            if member(x):
                found += 1
                yield x

    return Representation(
        member=member,
        leq=leq,
        enumerate=enum,
        name=f"rep[{beta}]",
        notation=beta,
        length=length,
        limit_digits=limit,
    )


def tail_below(r: LinearOrder, n: int) -> LinearOrder:
    """The suborder of elements x with x <= n; the clause is inclusive."""
    if not r.member(n):
        raise PreconditionError(f"{n} is not in the order's domain")

    def member(x: int) -> bool:
        return r.member(x) and r.leq(x, n)

    def enum() -> Iterator[int]:
        return (x for x in r.enumerate() if r.leq(x, n))

    return LinearOrder(member, r.leq, enum, name=f"{r.name}|<={n}")


# Well-ordered-part probing ----------------------------------------------------------------


@dataclass(frozen=True)
class WoProbeReport:
    prefix_size: int
    chain_depth: int
    inspected: tuple[int, ...]
    exhausted: bool
    suspects: frozenset[int]
    classified_wellfounded: frozenset[int]


def wo_probe(r: LinearOrder, n: int, l: int) -> WoProbeReport:
    """Heuristic well-foundedness probe over the first n enumerated elements.

    An element is a suspect when, after it arrives, the enumerator keeps
    producing elements strictly below it that form an l-step descending chain
    in arrival order.  If the enumerator exhausts within n elements the order
    is finite, hence well-founded, and nothing is suspect.  An element is
    classified well-founded when neither it nor anything below it (among the
    inspected) is a suspect.
    """
    if n < 1 or l < 1:
        raise PreconditionError("probe budgets must be >= 1")
    it = r.enumerate()
    inspected = list(itertools.islice(it, n))
    exhausted = len(inspected) < n
    if not exhausted:
        try:
            next(it)
        except StopIteration:
            exhausted = True

    if exhausted:
        return WoProbeReport(
            n, l, tuple(inspected), True, frozenset(), frozenset(inspected)
        )

    k = len(inspected)
    # chain[i]: longest arrival-increasing, order-descending chain starting at i.
    chain = [1] * k
    for i in range(k - 1, -1, -1):
        for j in range(i + 1, k):
            if r.less(inspected[j], inspected[i]) and chain[j] + 1 > chain[i]:
                chain[i] = chain[j] + 1

    suspects = set()
    for i, x in enumerate(inspected):
        for j in range(i + 1, k):
            if r.less(inspected[j], x) and chain[j] >= l:
                suspects.add(x)
                break

    classified = set()
    for x in inspected:
        if x in suspects:
            continue
        if any(y in suspects and r.less(y, x) for y in inspected):
            continue
        classified.add(x)

    return WoProbeReport(
        n, l, tuple(inspected), False, frozenset(suspects), frozenset(classified)
    )


# Coding compatibility ----------------------------------------------------------------


def compatible(r: LinearOrder, c: Coding) -> bool:
    """True when no base or symbol code of the coding lies in the order's domain."""
    for sym in c.structure.symbols:
        if r.member(c.base_code(sym.name)) or r.member(c.extended_code(sym.name)):
            return False
    return True


def shift_coding(m: Structure, r: LinearOrder, start: int = 0) -> Coding:
    """A coding for m whose base and symbol codes avoid the order's domain."""
    base: dict[str, int] = {}
    used: set[int] = set()
    for sym in m.symbols:
        v = start
        while True:
            if v not in used and not r.member(v):
                kind = 0 if sym.is_predicate else 1
                ext = 2 * coding.encode_seq([v, sym.arity, kind])
                if not r.member(ext):
                    break
            v += 1
        base[sym.name] = v
        used.add(v)
    return Coding(m, base)
