"""Sound fuel-bounded three-valued truth and the predicates built from it.

Certification rules: atomic sentences and closed-term reductions are always
decided; connectives combine by strong three-valued logic; an existential is
certified true by a witness below the quantifier budget B, and certified
false only when it is syntactically bounded (``exists x. x < t & ...`` with
``t`` closed and of value below B) and the sweep below the bound is decidedly
false everywhere; universals dually.  Everything else is Unknown.  Raising
fuel never flips a decided verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import coding, syntax
from .coding import FoVar, SoVar
from .errors import CodeLimitError, PreconditionError, SymbolError
from .structures import Coding, Structure, d_relation
from .syntax import (
    Apply,
    Atom,
    Binary,
    Formula,
    Not,
    Quant,
    SoAtom,
    Term,
    Var,
    decode_godel,
    free_vars,
    godel_number,
    instantiate,
    is_scheme,
    numeral,
    term_vars,
)

# Verdicts ----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Three-valued certified truth value."""

    value: str  # "true" | "false" | "unknown"
    certificate: str | None = field(default=None, compare=False)

    @property
    def is_true(self) -> bool:
        return self.value == "true"

    @property
    def is_false(self) -> bool:
        return self.value == "false"

    @property
    def is_unknown(self) -> bool:
        return self.value == "unknown"

    @property
    def decided(self) -> bool:
        return self.value != "unknown"

    def to_bool(self) -> bool:
        if self.is_unknown:
            raise ValueError("undecided verdict")
        return self.is_true

    @staticmethod
    def of(b: bool, certificate: str | None = None) -> "Verdict":
        return Verdict("true" if b else "false", certificate)

    @staticmethod
    def true(certificate: str | None = None) -> "Verdict":
        return Verdict("true", certificate)

    @staticmethod
    def false(certificate: str | None = None) -> "Verdict":
        return Verdict("false", certificate)

    @staticmethod
    def unknown(certificate: str | None = None) -> "Verdict":
        return Verdict("unknown", certificate)


TRUE = Verdict("true")
FALSE = Verdict("false")
UNKNOWN = Verdict("unknown")


def kleene_not(a: Verdict) -> Verdict:
    if a.is_unknown:
        return UNKNOWN
    return Verdict.of(not a.is_true, a.certificate)


def kleene_and(a: Verdict, b: Verdict) -> Verdict:
    if a.is_false or b.is_false:
        return FALSE
    if a.is_true and b.is_true:
        return TRUE
    return UNKNOWN


def kleene_or(a: Verdict, b: Verdict) -> Verdict:
    if a.is_true or b.is_true:
        return TRUE
    if a.is_false and b.is_false:
        return FALSE
    return UNKNOWN


def kleene_implies(a: Verdict, b: Verdict) -> Verdict:
    return kleene_or(kleene_not(a), b)


def kleene_iff(a: Verdict, b: Verdict) -> Verdict:
    if a.decided and b.decided:
        return Verdict.of(a.is_true == b.is_true)
    return UNKNOWN


def kleene_binary(op: str, a: Verdict, b: Verdict) -> Verdict:
    if op == "and":
        return kleene_and(a, b)
    if op == "or":
        return kleene_or(a, b)
    if op == "implies":
        return kleene_implies(a, b)
    if op == "iff":
        return kleene_iff(a, b)
    raise ValueError(op)


@dataclass(frozen=True)
class Fuel:
    """Quantifier bound B and sentence-size bound S."""

    bound: int
    size: int

    def __post_init__(self):
        if self.bound < 1 or self.size < 1:
            raise ValueError("fuel components must be >= 1")

    def bumped(self) -> "Fuel":
        return Fuel(self.bound + 1, self.size + 1)


# Term and quantifier-free evaluation ---------------------------------------


def term_value(m: Structure, t: Term, env: dict[int, int] | None = None) -> int:
    if isinstance(t, Var):
        if env is None or t.index not in env:
            raise PreconditionError(f"unbound variable x{t.index}")
        return env[t.index]
    sym = m.symbol(t.symbol)
    if sym.is_predicate:
        raise SymbolError(f"predicate {t.symbol!r} used as a function")
    return sym.value([term_value(m, a, env) for a in t.args], m.bound)


def eval_quantifier_free(
    m: Structure,
    phi: Formula,
    env: dict[int, int],
    so_tables: dict[SoVar, object] | None = None,
) -> bool:
    """Two-valued evaluation of a quantifier-free (scheme) formula.

    Second-order atoms look their argument tuple up in ``so_tables``; a table
    may be a set of tuples or a callable returning a bool.
    """
    if isinstance(phi, Atom):
        vals = tuple(term_value(m, t, env) for t in phi.args)
        result = m.symbol(phi.predicate).query(vals)
        if result is None:
            raise PreconditionError(f"partial predicate {phi.predicate!r} in two-valued context")
        return bool(result)
    if isinstance(phi, SoAtom):
        if so_tables is None:
            raise PreconditionError("second-order atom without an assignment")
        table = so_tables[SoVar(phi.arity, phi.index)]
        vals = tuple(term_value(m, t, env) for t in phi.args)
        if callable(table):
            return bool(table(vals))
        return vals in table
    if isinstance(phi, Not):
        return not eval_quantifier_free(m, phi.body, env, so_tables)
    if isinstance(phi, Binary):
        a = eval_quantifier_free(m, phi.left, env, so_tables)
        b = eval_quantifier_free(m, phi.right, env, so_tables)
        if phi.op == "and":
            return a and b
        if phi.op == "or":
            return a or b
        if phi.op == "implies":
            return (not a) or b
        return a == b
    raise PreconditionError("quantifier in quantifier-free evaluation")


# Sentence evaluation ----------------------------------------------------------------


def bounded_quant_shape(phi: Quant) -> tuple[Term, Formula] | None:
    """Return (bound term, body) for ``Qx. x < t & ...`` / ``Qx. x < t -> ...``."""
    want = "and" if phi.kind == "exists" else "implies"
    b = phi.body
    if (
        isinstance(b, Binary)
        and b.op == want
        and isinstance(b.left, Atom)
        and b.left.predicate == "<"
        and len(b.left.args) == 2
        and b.left.args[0] == Var(phi.var)
        and phi.var not in term_vars(b.left.args[1])
    ):
        return b.left.args[1], b.right
    return None


def eval_sentence(m: Structure, phi: Formula, fuel: Fuel) -> Verdict:
    """Certified-sound three-valued truth of a closed formula of ``m``."""
    if is_scheme(phi):
        raise SymbolError("schemes have no truth value; substitute their variables first")
    if free_vars(phi):
        raise PreconditionError("eval_sentence needs a closed formula")
    return _eval_closed(m, phi, fuel)


def _eval_closed(m: Structure, phi: Formula, fuel: Fuel) -> Verdict:
    if isinstance(phi, Atom):
        vals = tuple(term_value(m, t) for t in phi.args)
        result = m.symbol(phi.predicate).query(vals)
        if result is None:
            return Verdict.unknown("partial atomic point")
        return Verdict.of(bool(result), f"atomic {phi.predicate}{vals}")
    if isinstance(phi, Not):
        return kleene_not(_eval_closed(m, phi.body, fuel))
    if isinstance(phi, Binary):
        return kleene_binary(
            phi.op, _eval_closed(m, phi.left, fuel), _eval_closed(m, phi.right, fuel)
        )
    if isinstance(phi, Quant):
        return _eval_quant(m, phi, fuel)
    raise TypeError(phi)


def _eval_quant(m: Structure, phi: Quant, fuel: Fuel) -> Verdict:
    shape = bounded_quant_shape(phi)
    if shape is not None:
        bound_term, body = shape
        v = term_value(m, bound_term)
        if v < fuel.bound:
            return _sweep(m, phi, body, range(v), fuel, complete=True)
    body = phi.body
    return _sweep(m, phi, body, range(fuel.bound), fuel, complete=False)


def _sweep(
    m: Structure, phi: Quant, body: Formula, points: range, fuel: Fuel, complete: bool
) -> Verdict:
    saw_unknown = False
    for a in points:
        inst = instantiate(body, phi.var, a)
        sub = _eval_closed(m, inst, fuel)
        if phi.kind == "exists" and sub.is_true:
            return Verdict.true(f"witness x{phi.var}={a}")
        if phi.kind == "forall" and sub.is_false:
            return Verdict.false(f"counterexample x{phi.var}={a}")
        if sub.is_unknown:
            saw_unknown = True
    if saw_unknown or not complete:
        return UNKNOWN
    if phi.kind == "exists":
        return Verdict.false(f"exhausted below bound of {len(points)}")
    return Verdict.true(f"exhausted below bound of {len(points)}")


# Prenex classification ----------------------------------------------------------------


def is_delta0(phi: Formula) -> bool:
    """Every quantifier is syntactically bounded."""
    if isinstance(phi, (Atom, SoAtom)):
        return True
    if isinstance(phi, Not):
        return is_delta0(phi.body)
    if isinstance(phi, Binary):
        return is_delta0(phi.left) and is_delta0(phi.right)
    if isinstance(phi, Quant):
        shape = bounded_quant_shape(phi)
        return shape is not None and is_delta0(shape[1])
    raise TypeError(phi)


def classify_prenex(phi: Formula) -> tuple[str, int] | None:
    """Syntactic prenex class: ("delta0", 0), ("sigma", k), or ("pi", k).

    Returns None for formulas whose unbounded quantifiers do not form a
    prefix.
    """
    if is_delta0(phi):
        return ("delta0", 0)
    if not isinstance(phi, Quant):
        return None
    kind = phi.kind
    body: Formula = phi
    while isinstance(body, Quant) and body.kind == kind and not is_delta0(body):
        body = body.body
    sub = classify_prenex(body)
    if sub is None:
        return None
    own = "sigma" if kind == "exists" else "pi"
    if sub[0] == "delta0":
        return (own, 1)
    if sub[0] == own:
        return None
    return (own, sub[1] + 1)


def prenex_class(phi: Formula) -> tuple[str, int]:
    """Class of phi, prenexing first when the direct reading fails."""
    cls = classify_prenex(phi)
    if cls is None:
        cls = classify_prenex(syntax.to_prenex(phi).to_formula())
    if cls is None:
        raise PreconditionError("formula resists prenex classification")
    return cls


# Partial truth predicates ----------------------------------------------------------------


class PartialTruthSet:
    """Fuel-bounded window onto the truth predicate of a structure.

    Decided entries map sentence codes to sound verdicts and are monotone in
    fuel.  ``membership`` answers "is this code in the truth set" with a
    three-valued verdict: definite False for codes that are not sentence
    codes at all (or fall outside the prenex-class restriction, when one is
    set), Unknown for sentences outside the size window or beyond the
    certification rules.
    """

    def __init__(
        self,
        structure: Structure,
        coding_: Coding,
        fuel: Fuel,
        class_bound: int | None = None,
    ):
        self.structure = structure
        self.coding = coding_
        self.fuel = fuel
        self.class_bound = class_bound
        self._decided: dict[int, Verdict] = {}
        self._unknown: set[int] = set()

    # -- formula-level interface

    def decide(self, phi: Formula) -> Verdict:
        code = godel_number(phi, self.coding)
        return self.membership(code)

    def populate(self, sentences: Iterable[Formula]) -> "PartialTruthSet":
        for phi in sentences:
            self.decide(phi)
        return self

    # -- code-level interface

    def membership(self, code: int) -> Verdict:
        if code in self._decided:
            return self._decided[code]
        if code in self._unknown:
            return UNKNOWN
        try:
            phi = decode_godel(code, self.coding)
        except CodeLimitError:
            return Verdict.unknown("code outside limit")
        if phi is None or is_scheme(phi) or free_vars(phi):
            return Verdict.false("not the code of a sentence")
        if self.class_bound is not None:
            kind, level = prenex_class(phi)
            if level > self.class_bound:
                return Verdict.false(f"outside the class bound {self.class_bound}")
        if syntax.size(phi) > self.fuel.size:
            return Verdict.unknown("outside the size window")
        verdict = eval_sentence(self.structure, phi, self.fuel)
        if verdict.decided:
            self._decided[code] = verdict
        else:
            self._unknown.add(code)
        return verdict

    def decided(self) -> list[tuple[int, Verdict]]:
        return sorted(self._decided.items())

    def decided_true_codes(self) -> list[int]:
        return sorted(c for c, v in self._decided.items() if v.is_true)

    def decided_false_codes(self) -> list[int]:
        return sorted(c for c, v in self._decided.items() if v.is_false)

    def unknown_codes(self) -> list[int]:
        return sorted(self._unknown)

    def override(self, code: int, verdict: Verdict) -> None:
        """Force one decided entry; consistency-audit hook."""
        self._decided[code] = verdict

    def copy(self) -> "PartialTruthSet":
        clone = PartialTruthSet(self.structure, self.coding, self.fuel, self.class_bound)
        clone._decided = dict(self._decided)
        clone._unknown = set(self._unknown)
        return clone


def truth_predicate_approx(
    m: Structure,
    c: Coding,
    fuel: Fuel,
    corpus: Iterable[Formula] | None = None,
) -> PartialTruthSet:
    """Window onto Tr of m under c; optionally pre-populated with a corpus."""
    t = PartialTruthSet(m, c, fuel)
    if corpus is not None:
        t.populate(corpus)
    return t


def tr_k(
    m: Structure,
    c: Coding,
    k: int,
    fuel: Fuel,
    corpus: Iterable[Formula] | None = None,
) -> PartialTruthSet:
    """The k-truth window: restricted to sentences of prenex class <= k."""
    t = PartialTruthSet(m, c, fuel, class_bound=k)
    if corpus is not None:
        t.populate(corpus)
    return t


# Universal predicate ----------------------------------------------------------------


class UniversalPredicate:
    """Rows indexed by formula codes: the row at the code of a one-free-variable
    prenex-classifiable formula is the verdict-valued extension of that
    formula; every other row is definitely empty."""

    def __init__(self, structure: Structure, coding_: Coding, fuel: Fuel):
        self.structure = structure
        self.coding = coding_
        self.fuel = fuel
        self._rows: dict[int, tuple[Formula, int] | None] = {}

    def _row_formula(self, n: int) -> tuple[Formula, int] | None:
        if n in self._rows:
            return self._rows[n]
        phi = decode_godel(n, self.coding)
        result = None
        if phi is not None and not is_scheme(phi):
            fv = sorted(free_vars(phi))
            if len(fv) == 1 and classify_prenex(phi) is not None:
                result = (phi, fv[0])
        self._rows[n] = result
        return result

    def query(self, n: int, x: int) -> Verdict:
        row = self._row_formula(n)
        if row is None:
            return Verdict.false("row index codes no one-variable prenex formula")
        phi, v = row
        inst = syntax.substitute_vars(phi, {v: numeral(x)})
        return eval_sentence(self.structure, inst, self.fuel)

    def row(self, n: int):
        return lambda x: self.query(n, x)


def universal_predicate(m: Structure, c: Coding, fuel: Fuel) -> UniversalPredicate:
    return UniversalPredicate(m, c, fuel)


# Formula and truth derivations ----------------------------------------------------------------


def _subformulas(phi: Formula) -> list[Formula]:
    if isinstance(phi, (Atom, SoAtom)):
        return []
    if isinstance(phi, Not):
        return [phi.body]
    if isinstance(phi, Binary):
        return [phi.left, phi.right]
    if isinstance(phi, Quant):
        return [phi.body]
    raise TypeError(phi)


def formula_derivation(phi: Formula, c: Coding) -> tuple[int, ...]:
    """Codes of phi's subformulas in dependency order, ending at phi."""
    order: list[Formula] = []
    seen: set[Formula] = set()

    def walk(f: Formula):
        if f in seen:
            return
        for sub in _subformulas(f):
            walk(sub)
        seen.add(f)
        order.append(f)

    walk(phi)
    return tuple(godel_number(f, c) for f in order)


def _stream(code: int) -> tuple[int, ...] | None:
    seq = coding.decode_seq(code)
    return seq if seq else None


def check_formula_derivation(seq: Sequence[int], c: Coding) -> bool:
    """Clause check: every entry is atomic or assembled from earlier entries."""
    if not seq:
        return False

    def is_atomic_code(y: int) -> bool:
        phi = decode_godel(y, c)
        return isinstance(phi, (Atom, SoAtom))

    unary_heads = (coding.CONNECTIVE_CODES["not"],)
    quant_heads = (coding.CONNECTIVE_CODES["forall"], coding.CONNECTIVE_CODES["exists"])
    binary_heads = tuple(
        coding.CONNECTIVE_CODES[op] for op in ("and", "or", "implies", "iff")
    )

    def rel_unary(sel: int, y: int) -> bool:
        picked = coding.decode_seq(sel)
        if picked is None or len(picked) != 1:
            return False
        u = _stream(picked[0])
        ys = _stream(y)
        if u is None or ys is None:
            return False
        if ys == (unary_heads[0],) + u:
            return True
        return (
            len(ys) == len(u) + 2
            and ys[0] in quant_heads
            and coding.decode_odd_code(ys[1]) is not None
            and isinstance(coding.decode_odd_code(ys[1]), FoVar)
            and ys[2:] == u
        )

    def rel_binary(sel: int, y: int) -> bool:
        picked = coding.decode_seq(sel)
        if picked is None or len(picked) != 2:
            return False
        u, v = _stream(picked[0]), _stream(picked[1])
        ys = _stream(y)
        if u is None or v is None or ys is None:
            return False
        return ys[0:1] + u + v == ys and ys[0] in binary_heads

    return coding.derivation_ok(seq, is_atomic_code, [rel_unary, rel_binary], max_select=2)


def _probe_codes(n_free: int, fuel: Fuel) -> list[int]:
    from itertools import product

    w = min(fuel.bound, 3)
    lengths = {n_free, n_free + 1}
    if n_free > 0:
        lengths.add(n_free - 1)
    probes = []
    for length in sorted(lengths):
        for tup in product(range(w), repeat=length):
            probes.append(coding.encode_seq(tup))
    return sorted(set(probes))


def check_truth_derivation(seq: Sequence[int], g: UniversalPredicate, fuel: Fuel) -> Verdict:
    """Validate an alternating formula/row-code derivation against G.

    True when the even positions form a formula derivation and each row code
    matches the satisfying-tuple set of its formula on every probe; False on
    a decided mismatch; Unknown when some probe was undecidable.  Probes are
    sequence codes of small tuples, bounded by fuel.
    """
    if len(seq) < 2 or len(seq) % 2 != 0:
        return Verdict.false("malformed derivation")
    codes = list(seq[0::2])
    rows = list(seq[1::2])
    if not check_formula_derivation(codes, g.coding):
        return Verdict.false("even positions are not a formula derivation")

    saw_unknown = False
    for a, e in zip(codes, rows):
        phi = decode_godel(a, g.coding)
        if phi is None or is_scheme(phi):
            return Verdict.false(f"entry {a} is not a formula of the structure")
        fv = sorted(free_vars(phi))
        for p in _probe_codes(len(fv), fuel):
            expected = _satisfying_code_verdict(g.structure, phi, fv, p, fuel)
            actual = g.query(e, p)
            if expected.decided and actual.decided and expected.is_true != actual.is_true:
                return Verdict.false(f"row {e} disagrees with entry {a} at probe {p}")
            if expected.is_unknown or actual.is_unknown:
                saw_unknown = True
    if saw_unknown:
        return UNKNOWN
    return Verdict.true("all probes agree")


def _satisfying_code_verdict(
    m: Structure, phi: Formula, fv: list[int], p: int, fuel: Fuel
) -> Verdict:
    s = coding.decode_seq(p)
    if s is None or len(s) < len(fv):
        return Verdict.false("probe codes no long-enough sequence")
    inst = syntax.substitute_vars(phi, {v: numeral(s[i]) for i, v in enumerate(fv)})
    return eval_sentence(m, inst, fuel)


# Tarski fixpoint audit ----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: int
    clause: str
    detail: str


def tarski_fixpoint_check(
    m: Structure, c: Coding, t: PartialTruthSet, fuel: Fuel
) -> list[Violation]:
    """Audit every decided entry of ``t`` against the Tarski clauses.

    Clause 1 checks numeral-argument atoms against the symbol-extension
    relation, clause 2 reduces closed atomic sentences through term values,
    clause 3 covers the connectives by strong three-valued consistency, and
    clause 4 sweeps quantifier witnesses below the fuel bound.  Undecided
    subqueries are tolerated; only decided contradictions are violations.
    """
    d = d_relation(m, c)
    violations: list[Violation] = []

    def member(phi: Formula) -> Verdict:
        try:
            return t.membership(godel_number(phi, c))
        except CodeLimitError:
            return Verdict.unknown("reduced code outside limit")

    for code, verdict in t.decided():
        phi = decode_godel(code, c)
        if phi is None or is_scheme(phi) or free_vars(phi):
            violations.append(Violation(code, "domain", "decided entry is not a sentence code"))
            continue
        v = verdict.is_true
        if isinstance(phi, Atom):
            vals = [syntax.numeral_value(a) for a in phi.args]
            if all(x is not None for x in vals):
                row = d.query(c.extended_code(phi.predicate), coding.encode_seq(vals))
                if row != v:
                    violations.append(
                        Violation(code, "atomic", f"extension says {row}, entry says {v}")
                    )
            else:
                reduced = Atom(
                    phi.predicate, tuple(numeral(term_value(m, a)) for a in phi.args)
                )
                rv = member(reduced)
                if rv.decided and rv.is_true != v:
                    violations.append(
                        Violation(code, "closed-term", f"reduction says {rv.value}, entry says {v}")
                    )
        elif isinstance(phi, Not):
            sub = member(phi.body)
            if sub.decided and sub.is_true == v:
                violations.append(Violation(code, "negation", f"body is {sub.value}, entry says {v}"))
        elif isinstance(phi, Binary):
            comp = kleene_binary(phi.op, member(phi.left), member(phi.right))
            if comp.decided and comp.is_true != v:
                violations.append(
                    Violation(code, phi.op, f"components force {comp.value}, entry says {v}")
                )
        elif isinstance(phi, Quant):
            violations.extend(_check_quant_clause(m, phi, code, v, member, fuel))
    return violations


def _check_quant_clause(m, phi: Quant, code: int, v: bool, member, fuel: Fuel):
    shape = bounded_quant_shape(phi)
    complete = False
    points = range(fuel.bound)
    if shape is not None:
        bound_value = term_value(m, shape[0])
        if bound_value < fuel.bound:
            complete = True
            points = range(bound_value)
    body = phi.body
    subs = [member(instantiate(body, phi.var, a)) for a in points]
    good = any(s.is_true for s in subs) if phi.kind == "exists" else not any(
        s.is_false for s in subs
    )
    some_unknown = any(s.is_unknown for s in subs)
    if phi.kind == "exists":
        if v and not good and (complete and not some_unknown):
            return [Violation(code, "exists", "no witness below the (complete) bound")]
        if not v and good:
            return [Violation(code, "exists", "a witness below the bound contradicts False")]
    else:
        if v and not good:
            return [Violation(code, "forall", "a counterexample below the bound contradicts True")]
        if not v and good and (complete and not some_unknown):
            return [Violation(code, "forall", "the (complete) sweep is all true")]
    return []
