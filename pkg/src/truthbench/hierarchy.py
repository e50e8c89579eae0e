"""Transfinite recursion and the stagewise iterated truth predicate.

Stages are materialized desk-scale: the first ``stages`` domain elements of
the representation (by arrival) are selected and processed in the order's
own sequence, so limit keys see the union of every earlier materialized row.
Rows of the iterated truth predicate are windows onto partial truth sets;
unknown points stay unknown and are never promoted, so a stage predicate
answers True, False, or None exactly as its row data warrants.

Stage structures name the row at key m by the unary predicate ``Tr_<m>``
whose induced base code is m itself; compatibility of the representation
with the base coding keeps the induced coding injective.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import coding, syntax
from .errors import PreconditionError, SymbolError
from .evaluation import (
    Fuel,
    PartialTruthSet,
    Verdict,
    truth_predicate_approx,
)
from .ordinals import LinearOrder, OrdinalNotation, Representation, compatible
from .structures import Coding, PredicateSym, Structure, extend
from .syntax import Atom, Formula, numeral, parse

STAGE_PREDICATE_PREFIX = "Tr_"
DEFAULT_MAX_ORDER_TYPE = OrdinalNotation.parse("w*4")


# Staged relations ----------------------------------------------------------------


@dataclass
class StagedRelation:
    """Partial (n+1)-ary relation: one bounded n-ary window per stage key.

    ``rows`` holds decided-true tuples, ``unknown`` the unknown-masked ones,
    and ``probed`` the probed universe per key (None for a fully decided
    window, as in plain recursion).  Rows at keys outside the stage schedule
    are empty.
    """

    arity: int
    keys: tuple[int, ...]
    rows: dict[int, frozenset] = field(default_factory=dict)
    unknown: dict[int, frozenset] = field(default_factory=dict)
    probed: dict[int, frozenset | None] = field(default_factory=dict)

    def row(self, key: int) -> frozenset:
        return self.rows.get(key, frozenset())

    def unknown_at(self, key: int) -> frozenset:
        return self.unknown.get(key, frozenset())

    def probed_at(self, key: int) -> frozenset | None:
        return self.probed.get(key, frozenset())

    def decided_false(self, key: int) -> frozenset | None:
        probed = self.probed.get(key, frozenset())
        if probed is None:
            return None
        return frozenset(probed) - self.row(key) - self.unknown_at(key)

    def point_verdict(self, key: int, point: tuple) -> bool | None:
        if point in self.row(key):
            return True
        if point in self.unknown_at(key):
            return None
        probed = self.probed.get(key, frozenset())
        if probed is None or point in probed:
            return False
        return None

    def to_json(self) -> dict:
        def dump_set(s):
            return sorted(list(t) for t in s)

        stages = []
        for key in self.keys:
            probed = self.probed.get(key, frozenset())
            stages.append(
                {
                    "key": key,
                    "true": dump_set(self.row(key)),
                    "unknown": dump_set(self.unknown_at(key)),
                    "probed": None if probed is None else dump_set(probed),
                }
            )
        return {"arity": self.arity, "stages": stages}


def _normalize_window(window_points, arity: int) -> frozenset:
    out = set()
    for p in window_points:
        t = (p,) if isinstance(p, int) else tuple(p)
        if len(t) != arity:
            raise PreconditionError(f"tuple {t} does not have arity {arity}")
        out.add(t)
    return frozenset(out)


def _cap_window(points: frozenset, window: int) -> frozenset:
    return frozenset(t for t in points if all(0 <= v < window for v in t))


def select_stage_keys(r: Representation, stages: int) -> tuple[int, ...]:
    """First ``stages`` domain elements by arrival, sorted into stage order."""
    if stages < 0:
        raise PreconditionError("stages must be >= 0")
    if r.notation.is_finite and stages > r.notation.as_int():
        raise PreconditionError(
            f"stage bound {stages} exceeds the order type {r.notation}"
        )
    first = list(itertools.islice(r.enumerate(), stages))
    return tuple(sorted(first, key=lambda x: coding.decode_seq(x)))


StageFunction = Callable[[frozenset], Iterable]


def rek(
    b,
    f: StageFunction,
    r: Representation,
    stages: int,
    window: int,
    arity: int = 1,
) -> StagedRelation:
    """Transfinite recursion: row B at the first key, F of all earlier rows after.

    ``f`` receives the union of the strictly earlier rows, each tuple tagged
    by its stage key in front, and returns the next row's tuples.  Window
    caps every materialized tuple entry.
    """
    keys = select_stage_keys(r, stages)
    rows: dict[int, frozenset] = {}
    out = StagedRelation(arity, keys, rows, {}, {k: None for k in keys})
    if not keys:
        return out
    zero = r.element_at(OrdinalNotation())
    if keys[0] != zero:
        raise PreconditionError("stage schedule does not start at the least element")
    rows[keys[0]] = _cap_window(_normalize_window(b, arity), window)
    for i, key in enumerate(keys[1:], start=1):
        tagged = frozenset(
            (m,) + t for m in keys[:i] for t in rows[m]
        )
        rows[key] = _cap_window(_normalize_window(f(tagged), arity), window)
    return out


# Stage structures ----------------------------------------------------------------


def _stage_predicate(key: int, membership: Callable[[int], bool | None]) -> PredicateSym:
    return PredicateSym(f"{STAGE_PREDICATE_PREFIX}{key}", 1, lambda v: membership(v))


def _extend_with_rows(
    m: Structure,
    c: Coding,
    row_predicates: Sequence[tuple[int, Callable[[int], bool | None]]],
) -> tuple[Structure, Coding]:
    preds = [_stage_predicate(key, fn) for key, fn in row_predicates]
    struct = extend(m, preds)
    base = dict(c.base)
    for (key, _), pred in zip(row_predicates, preds):
        if key in base.values():
            raise SymbolError(
                f"induced base code {key} collides with the base coding; "
                "use a compatible (shifted) coding"
            )
        base[pred.name] = key
    return struct, Coding(struct, base)


def stage_structure(
    m: Structure, c: Coding, u: StagedRelation, r: LinearOrder, n: int
) -> tuple[Structure, Coding]:
    """The structure M_{<n}: M plus one unary predicate per earlier row of u.

    The predicate for the row at key k answers from u's window: True on
    decided-true points, False on probed points outside the row, None
    elsewhere.  Its induced base code is k itself.
    """
    if not r.member(n):
        raise PreconditionError(f"{n} is outside the order's domain")
    earlier = [k for k in u.keys if r.less(k, n)]

    def membership_fn(key: int) -> Callable[[int], bool | None]:
        return lambda v: u.point_verdict(key, (v,))

    return _extend_with_rows(m, c, [(k, membership_fn(k)) for k in earlier])


# Corpora ----------------------------------------------------------------

_BASE_CORPUS_TEXTS = (
    "0 = 0",
    "0 < 0",
    "0 < S(0)",
    "S(0) + S(0) = S(S(0))",
    "exists x0. x0 < 3 & x0 = S(S(0))",
    "forall x0. x0 < 2 -> x0 < 4",
    "forall x0. x0 < 3 -> 0 < S(x0)",
    "exists x0. x0 < 2 & S(x0) = 0",
)


def membership_sentence(key: int, code: int) -> Formula:
    """The sentence asserting that ``code`` lies in the row at ``key``."""
    return Atom(f"{STAGE_PREDICATE_PREFIX}{key}", (numeral(code),))


CorpusFn = Callable[[int, Structure, Coding, tuple[int, ...], int], list[Formula]]


def standard_corpus_fn(
    base_coding: Coding, plant_texts: Sequence[str] = ("0 = 0", "0 < 0")
) -> CorpusFn:
    """Per-stage corpus: small arithmetic sentences plus planted membership
    probes, about every earlier row, of the given base sentences (their codes
    are stage-independent since the induced coding extends the base one)."""
    base_struct = base_coding.structure
    plant_codes = [
        syntax.godel_number(parse(t, base_struct), base_coding) for t in plant_texts
    ]

    def corpus(stage_index, struct, codg, earlier_keys, window):
        sentences = [parse(t, struct) for t in _BASE_CORPUS_TEXTS]
        for key in earlier_keys:
            for code in plant_codes:
                sentences.append(membership_sentence(key, code))
        return sentences[:window]

    return corpus


def _stage_fuel(fuel: Fuel, index: int, bound_ratio: float) -> Fuel:
    return Fuel(max(2, int(fuel.bound * bound_ratio**index)), fuel.size)


def _stage_window(window: int, index: int, ratio: float) -> int:
    return max(4, int(window * ratio**index))


# Iterated truth ----------------------------------------------------------------


@dataclass
class IteratedTruthRun:
    """Materialized tower: the staged relation plus per-stage apparatus."""

    staged: StagedRelation
    structures: dict[int, Structure]
    codings: dict[int, Coding]
    truth_sets: dict[int, PartialTruthSet]


def iterated_truth(
    m: Structure,
    c: Coding,
    r: Representation,
    fuel: Fuel,
    stages: int,
    window: int,
    corpus_fn: CorpusFn | None = None,
    window_ratio: float = 0.75,
    bound_ratio: float = 0.9,
    max_order_type: OrdinalNotation = DEFAULT_MAX_ORDER_TYPE,
) -> StagedRelation:
    return run_iterated_truth(
        m,
        c,
        r,
        fuel,
        stages,
        window,
        corpus_fn=corpus_fn,
        window_ratio=window_ratio,
        bound_ratio=bound_ratio,
        max_order_type=max_order_type,
    ).staged


def run_iterated_truth(
    m: Structure,
    c: Coding,
    r: Representation,
    fuel: Fuel,
    stages: int,
    window: int,
    corpus_fn: CorpusFn | None = None,
    window_ratio: float = 0.75,
    bound_ratio: float = 0.9,
    max_order_type: OrdinalNotation = DEFAULT_MAX_ORDER_TYPE,
) -> IteratedTruthRun:
    """Materialize the iterated truth tower along r, stage by stage.

    The row at the least key is the plain truth window of (m, c); the row at
    a later key is the truth window of the stage structure carrying every
    strictly earlier materialized row.  Windows and quantifier fuel shrink
    geometrically with the stage index.
    """
    if not compatible(r, c):
        raise PreconditionError("representation and coding are not compatible")
    if not r.notation <= max_order_type:
        raise PreconditionError(
            f"order type {r.notation} exceeds the configured cap {max_order_type}"
        )
    if corpus_fn is None:
        corpus_fn = standard_corpus_fn(c)

    keys = select_stage_keys(r, stages)
    staged = StagedRelation(1, keys)
    run = IteratedTruthRun(staged, {}, {}, {})
    if not keys:
        return run
    zero = r.element_at(OrdinalNotation())
    if keys[0] != zero:
        raise PreconditionError("stage schedule does not start at the least element")

    for index, key in enumerate(keys):
        earlier = keys[:index]
        if index == 0:
            struct, codg = m, c
        else:
            live = [
                (k, _live_membership(run.truth_sets[k])) for k in earlier
            ]
            struct, codg = _extend_with_rows(m, c, live)
        stage_fuel = _stage_fuel(fuel, index, bound_ratio)
        pts = PartialTruthSet(struct, codg, stage_fuel)
        corpus = corpus_fn(
            index, struct, codg, tuple(earlier), _stage_window(window, index, window_ratio)
        )
        pts.populate(corpus)
        run.structures[key] = struct
        run.codings[key] = codg
        run.truth_sets[key] = pts
        staged.rows[key] = frozenset((code,) for code in pts.decided_true_codes())
        staged.unknown[key] = frozenset((code,) for code in pts.unknown_codes())
        staged.probed[key] = (
            frozenset((code,) for code, _ in pts.decided())
            | staged.unknown[key]
        )
    return run


def _live_membership(pts: PartialTruthSet) -> Callable[[int], bool | None]:
    def membership(v: int) -> bool | None:
        verdict = pts.membership(v)
        if verdict.decided:
            return verdict.is_true
        return None

    return membership


def tarski_step_function(
    m: Structure,
    c: Coding,
    r: Representation,
    fuel: Fuel,
    window: int,
    corpus_fn: CorpusFn | None = None,
    window_ratio: float = 0.75,
    bound_ratio: float = 0.9,
) -> StageFunction:
    """The Tarski step packaged for ``rek``: from the tagged union of earlier
    rows, build the stage structure (probed rows read two-valued) and return
    the decided-true codes of its truth window."""
    if corpus_fn is None:
        corpus_fn = standard_corpus_fn(c)

    def step(tagged: frozenset) -> frozenset:
        keys = sorted({t[0] for t in tagged}, key=lambda x: coding.decode_seq(x))
        rows = {k: frozenset(t[1:] for t in tagged if t[0] == k) for k in keys}

        def membership_fn(key: int) -> Callable[[int], bool | None]:
            return lambda v: (v,) in rows[key]

        struct, codg = _extend_with_rows(m, c, [(k, membership_fn(k)) for k in keys])
        index = len(keys)
        pts = PartialTruthSet(struct, codg, _stage_fuel(fuel, index, bound_ratio))
        pts.populate(
            corpus_fn(index, struct, codg, tuple(keys), _stage_window(window, index, window_ratio))
        )
        return frozenset((code,) for code in pts.decided_true_codes())

    return step


# Membership in Tr-bar ----------------------------------------------------------------


def check_trbar_membership(
    u: StagedRelation,
    m: Structure,
    c: Coding,
    r: LinearOrder,
    fuel: Fuel,
) -> Verdict:
    """Fuel-bounded audit of the defining clauses of the iterated tower.

    True only when every decided point of u matches the truth window it is
    required to equal (the plain one at the least key, the stage-structure
    one later); False on a decided conflict; Unknown otherwise.
    """
    keys = [k for k in u.keys if u.row(k) or u.probed_at(k)]
    for k in keys:
        if not r.member(k):
            if u.row(k):
                return Verdict.false(f"nonempty row at {k}, outside the order's domain")
    keys = [k for k in keys if r.member(k)]
    if not keys:
        return Verdict.true("vacuous: no materialized rows")
    keys.sort(key=lambda a: sum(r.less(b, a) for b in keys))

    least = keys[0]
    if isinstance(r, Representation):
        rho0 = r.element_at(OrdinalNotation())
        if rho0 is not None and least != rho0:
            return Verdict.unknown("the least materialized key is not the order's first element")

    saw_unknown = False
    for i, key in enumerate(keys):
        if i == 0:
            struct, codg = m, c
        else:
            struct, codg = stage_structure(m, c, u, r, key)
        pts = PartialTruthSet(struct, codg, fuel)
        probed = u.probed_at(key)
        points = set(u.row(key)) | set(u.unknown_at(key)) | set(probed or ())
        for (code,) in sorted(points):
            claimed = u.point_verdict(key, (code,))
            fresh = pts.membership(code)
            if claimed is None or not fresh.decided:
                saw_unknown = saw_unknown or claimed is None or not fresh.decided
                continue
            if fresh.is_true != claimed:
                return Verdict.false(
                    f"row at {key} says {claimed} on {code}, the clauses say {fresh.value}"
                )
    if saw_unknown:
        return Verdict.unknown("some points could not be rechecked within fuel")
    return Verdict.true("all decided points match the clauses")
