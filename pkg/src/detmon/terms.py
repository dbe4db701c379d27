"""Core term syntax: monitors, processes, and recursive safety formulas.

Monitors are CCS-style terms that observe a trace and may commit to a
verdict.  Processes share the same grammar except that verdicts are
replaced by the inert ``nil`` (and verdict names may occur as ordinary
action labels).  Formulas are the recursive modal logic the monitors are
synthesised from; the safety fragment uses box/conjunction/greatest
fixpoints, the co-safety fragment the duals.

All nodes are immutable and compare structurally, so terms can be used
as set members and dict keys throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

# Verdict names.
YES = "yes"
NO = "no"
END = "end"
VERDICTS = (YES, NO, END)

# The silent action.  Never a member of a declared alphabet.
TAU = "tau"

# Reserved marker action used by the two-verdict determinization pipeline
# (a rejection verdict recast as an observable action).
NO_MARKER = "[no]"

_KEYWORDS = frozenset(
    {"rec", "max", "min", "tt", "ff", "nil", TAU, *VERDICTS}
)


class TermError(ValueError):
    """A term violates a structural requirement."""


class FreeVariableError(TermError):
    """A closed term was required but a free recursion variable remains."""


class FragmentError(TermError):
    """A formula lies outside the fragment an operation supports."""


# ---------------------------------------------------------------------------
# Monitor / process nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """A committed verdict: ``yes``, ``no`` or the inconclusive ``end``."""

    value: str

    def __post_init__(self) -> None:
        if self.value not in VERDICTS:
            raise TermError(f"unknown verdict {self.value!r}")


@dataclass(frozen=True)
class Nil:
    """The inert process.  Unlike a verdict it has no transitions at all."""


@dataclass(frozen=True)
class Prefix:
    action: str
    body: "Term"


@dataclass(frozen=True)
class Sum:
    """An n-ary external choice, kept flat: no summand is itself a Sum."""

    summands: tuple["Term", ...]

    def __post_init__(self) -> None:
        if len(self.summands) < 2:
            raise TermError("a choice needs at least two summands")
        if any(isinstance(s, Sum) for s in self.summands):
            raise TermError("nested Sum; build choices with mk_sum")


@dataclass(frozen=True)
class Rec:
    var: str
    body: "Term"


@dataclass(frozen=True)
class Var:
    name: str


Monitor = Union[Verdict, Prefix, Sum, Rec, Var]
Process = Union[Nil, Prefix, Sum, Rec, Var]


# ---------------------------------------------------------------------------
# Formula nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TT:
    pass


@dataclass(frozen=True)
class FF:
    pass


@dataclass(frozen=True)
class Box:
    """Universal modality: after every weak `action`-step the body holds."""

    action: str
    body: "Formula"


@dataclass(frozen=True)
class Diamond:
    """Existential modality, the dual of Box."""

    action: str
    body: "Formula"


@dataclass(frozen=True)
class And:
    conjuncts: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.conjuncts) < 2:
            raise TermError("a conjunction needs at least two conjuncts")
        if any(isinstance(c, And) for c in self.conjuncts):
            raise TermError("nested And; build conjunctions with mk_and")


@dataclass(frozen=True)
class Or:
    disjuncts: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.disjuncts) < 2:
            raise TermError("a disjunction needs at least two disjuncts")
        if any(isinstance(d, Or) for d in self.disjuncts):
            raise TermError("nested Or; build disjunctions with mk_or")


@dataclass(frozen=True)
class Max:
    """Greatest fixpoint binder."""

    var: str
    body: "Formula"


@dataclass(frozen=True)
class Min:
    """Least fixpoint binder."""

    var: str
    body: "Formula"


Formula = Union[TT, FF, Box, Diamond, And, Or, Max, Min, Var]

Term = Union[Monitor, Process, Formula]


# ---------------------------------------------------------------------------
# Smart constructors
# ---------------------------------------------------------------------------


def mk_sum(summands: Iterable[Monitor]) -> Monitor:
    """Build a flat choice.  One summand collapses to the summand itself."""
    flat: list[Monitor] = []
    for s in summands:
        if isinstance(s, Sum):
            flat.extend(s.summands)
        else:
            flat.append(s)
    if not flat:
        raise TermError("empty choice")
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def mk_and(conjuncts: Iterable[Formula]) -> Formula:
    """Flat conjunction with units applied: drops tt, absorbs ff,
    deduplicates while preserving first-occurrence order.  The empty
    conjunction is tt."""
    flat: list[Formula] = []
    for c in conjuncts:
        if isinstance(c, And):
            flat.extend(c.conjuncts)
        else:
            flat.append(c)
    out: list[Formula] = []
    for c in flat:
        if isinstance(c, FF):
            return FF()
        if isinstance(c, TT) or c in out:
            continue
        out.append(c)
    if not out:
        return TT()
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def mk_or(disjuncts: Iterable[Formula]) -> Formula:
    """Dual of mk_and: drops ff, absorbs tt; the empty disjunction is ff."""
    flat: list[Formula] = []
    for d in disjuncts:
        if isinstance(d, Or):
            flat.extend(d.disjuncts)
        else:
            flat.append(d)
    out: list[Formula] = []
    for d in flat:
        if isinstance(d, TT):
            return TT()
        if isinstance(d, FF) or d in out:
            continue
        out.append(d)
    if not out:
        return FF()
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def prefix_chain(actions: Iterable[str], tail: Monitor) -> Monitor:
    """a1.a2...an.tail"""
    m = tail
    for a in reversed(list(actions)):
        m = Prefix(a, m)
    return m


# ---------------------------------------------------------------------------
# Metrics and queries
# ---------------------------------------------------------------------------


def size(term: Term) -> int:
    """Node count of a monitor or process term.

    An n-ary choice contributes n-1 (it stands for n-1 binary choices).
    """
    if isinstance(term, (Verdict, Var, Nil)):
        return 1
    if isinstance(term, Prefix):
        return 1 + size(term.body)
    if isinstance(term, Rec):
        return 1 + size(term.body)
    if isinstance(term, Sum):
        return len(term.summands) - 1 + sum(size(s) for s in term.summands)
    raise TermError(f"size is defined on monitor/process terms, not {term!r}")


def height(term: Term) -> int:
    """Longest chain of action prefixes; recursion binders add nothing."""
    if isinstance(term, (Verdict, Var, Nil)):
        return 1
    if isinstance(term, Prefix):
        return 1 + height(term.body)
    if isinstance(term, Rec):
        return height(term.body)
    if isinstance(term, Sum):
        return max(height(s) for s in term.summands)
    raise TermError(f"height is defined on monitor/process terms, not {term!r}")


def subterms(term: Term) -> Iterator[Term]:
    """All subterms in preorder, including the term itself."""
    yield term
    if isinstance(term, (Prefix, Rec)):
        yield from subterms(term.body)
    elif isinstance(term, Sum):
        for s in term.summands:
            yield from subterms(s)
    elif isinstance(term, (Box, Diamond, Max, Min)):
        yield from subterms(term.body)
    elif isinstance(term, And):
        for c in term.conjuncts:
            yield from subterms(c)
    elif isinstance(term, Or):
        for d in term.disjuncts:
            yield from subterms(d)


def _children(term: Term) -> tuple[Term, ...]:
    if isinstance(term, (Prefix, Rec, Box, Diamond, Max, Min)):
        return (term.body,)
    if isinstance(term, Sum):
        return term.summands
    if isinstance(term, And):
        return term.conjuncts
    if isinstance(term, Or):
        return term.disjuncts
    return ()


def free_vars(term: Term) -> frozenset[str]:
    if isinstance(term, Var):
        return frozenset({term.name})
    if isinstance(term, (Rec, Max, Min)):
        return free_vars(term.body) - {term.var}
    out: set[str] = set()
    for c in _children(term):
        out |= free_vars(c)
    return frozenset(out)


def binder_names(term: Term) -> list[str]:
    """Names of all recursion binders, in preorder (with repeats)."""
    out: list[str] = []
    for t in subterms(term):
        if isinstance(t, (Rec, Max, Min)):
            out.append(t.var)
    return out


def actions_in(term: Term) -> frozenset[str]:
    out: set[str] = set()
    for t in subterms(term):
        if isinstance(t, Prefix):
            out.add(t.action)
        elif isinstance(t, (Box, Diamond)):
            out.add(t.action)
    return frozenset(out)


def verdicts_in(term: Term) -> frozenset[str]:
    return frozenset(t.value for t in subterms(term) if isinstance(t, Verdict))


def is_shml(f: Formula) -> bool:
    """Safety fragment: no diamonds, disjunctions or least fixpoints."""
    return not any(isinstance(t, (Diamond, Or, Min)) for t in subterms(f))


def is_chml(f: Formula) -> bool:
    """Co-safety fragment: no boxes, conjunctions or greatest fixpoints."""
    return not any(isinstance(t, (Box, And, Max)) for t in subterms(f))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


def subst(term: Term, var: str, replacement: Term) -> Term:
    """term[replacement/var] on monitor/process terms.

    No capture avoidance is attempted: the intended use is unfolding
    recursion, where the planted term is closed.
    """
    if isinstance(term, Var):
        return replacement if term.name == var else term
    if isinstance(term, (Verdict, Nil)):
        return term
    if isinstance(term, Prefix):
        return Prefix(term.action, subst(term.body, var, replacement))
    if isinstance(term, Sum):
        return Sum(tuple(subst(s, var, replacement) for s in term.summands))
    if isinstance(term, Rec):
        if term.var == var:  # shadowed
            return term
        return Rec(term.var, subst(term.body, var, replacement))
    raise TermError(f"cannot substitute into {term!r}")


def subst_formula(f: Formula, mapping: dict[str, Formula]) -> Formula:
    """Simultaneous substitution of formulas for free variables.

    Binders deliberately capture: replacing X under ``max X`` is the
    mechanism by which equation elimination re-ties recursion, so a
    bound variable simply shadows any mapping entry of the same name.
    """
    if not mapping:
        return f
    if isinstance(f, Var):
        return mapping.get(f.name, f)
    if isinstance(f, (TT, FF)):
        return f
    if isinstance(f, Box):
        return Box(f.action, subst_formula(f.body, mapping))
    if isinstance(f, Diamond):
        return Diamond(f.action, subst_formula(f.body, mapping))
    if isinstance(f, And):
        return mk_and(subst_formula(c, mapping) for c in f.conjuncts)
    if isinstance(f, Or):
        return mk_or(subst_formula(d, mapping) for d in f.disjuncts)
    if isinstance(f, (Max, Min)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        body = subst_formula(f.body, inner)
        return type(f)(f.var, body)
    raise TermError(f"cannot substitute into {f!r}")


# ---------------------------------------------------------------------------
# Well-forming
# ---------------------------------------------------------------------------


def _fresh_names(bases: list[str], taken: set[str]) -> dict[tuple[str, int], str]:
    """Assign the i-th binder occurrence of each clashing base a fresh name.

    A base used by exactly one binder keeps its name; a base used by k>1
    binders has its occurrences renamed base1, base2, ... left to right,
    skipping anything already taken.
    """
    from collections import Counter

    counts = Counter(bases)
    assignment: dict[tuple[str, int], str] = {}
    seen: dict[str, int] = {}
    for base in bases:
        idx = seen.get(base, 0)
        seen[base] = idx + 1
        if counts[base] == 1:
            assignment[(base, idx)] = base
            continue
        i = 1
        while True:
            cand = f"{base}{i}"
            if cand not in taken:
                break
            i += 1
        taken.add(cand)
        assignment[(base, idx)] = cand
    return assignment


def well_form(m: Monitor, alphabet: frozenset[str]) -> Monitor:
    """Validate and normalise a monitor term.

    Checks that every action is in the declared alphabet and that no
    binder name clashes with it, collapses ``rec x.v`` onto the verdict
    ``v`` bottom-up, renames duplicate binders apart, and finally
    requires the result to be closed.

    The collapse skips recursions sitting directly inside a choice: the
    unfolding step lets the whole choice reach ``v`` without consuming
    an action, which a bare verdict summand cannot do, so rewriting
    there would change what the monitor flags on the current trace.
    """
    if not alphabet:
        raise TermError("the alphabet must be non-empty")
    bad = actions_in(m) - alphabet
    if bad:
        raise TermError(f"actions not in the declared alphabet: {sorted(bad)}")
    clash = set(binder_names(m)) & set(alphabet)
    if clash:
        raise TermError(f"binder names clash with the alphabet: {sorted(clash)}")

    def collapse(t: Monitor, in_sum: bool = False) -> Monitor:
        if isinstance(t, (Verdict, Var)):
            return t
        if isinstance(t, Prefix):
            return Prefix(t.action, collapse(t.body))
        if isinstance(t, Sum):
            return mk_sum(collapse(s, in_sum=True) for s in t.summands)
        if isinstance(t, Rec):
            body = collapse(t.body)
            if isinstance(body, Verdict) and not in_sum:
                return body
            return Rec(t.var, body)
        raise TermError(f"not a monitor term: {t!r}")

    m = collapse(m)

    bases = binder_names(m)
    taken = (
        set(bases)
        | {v.name for v in subterms(m) if isinstance(v, Var)}
        | set(alphabet)
        | set(_KEYWORDS)
    )
    assignment = _fresh_names(bases, taken)
    occurrence: dict[str, int] = {}

    def rename(t: Monitor, env: dict[str, str]) -> Monitor:
        if isinstance(t, Verdict):
            return t
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Prefix):
            return Prefix(t.action, rename(t.body, env))
        if isinstance(t, Sum):
            return Sum(tuple(rename(s, env) for s in t.summands))
        if isinstance(t, Rec):
            idx = occurrence.get(t.var, 0)
            occurrence[t.var] = idx + 1
            new = assignment[(t.var, idx)]
            return Rec(new, rename(t.body, {**env, t.var: new}))
        raise TermError(f"not a monitor term: {t!r}")

    m = rename(m, {})

    free = free_vars(m)
    if free:
        raise FreeVariableError(f"free recursion variables: {sorted(free)}")
    return m


def uniquify_formula(f: Formula, reserved: Iterable[str] = ()) -> Formula:
    """Rename fixpoint binders so all are distinct from each other, from
    every free variable, and from `reserved`."""
    taken = set(reserved) | set(free_vars(f)) | set(binder_names(f))
    used: set[str] = set(free_vars(f))

    def fresh(base: str) -> str:
        if base not in used:
            used.add(base)
            return base
        i = 1
        while f"{base}{i}" in taken or f"{base}{i}" in used:
            i += 1
        name = f"{base}{i}"
        used.add(name)
        return name

    def walk(t: Formula, env: dict[str, str]) -> Formula:
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, (TT, FF)):
            return t
        if isinstance(t, Box):
            return Box(t.action, walk(t.body, env))
        if isinstance(t, Diamond):
            return Diamond(t.action, walk(t.body, env))
        if isinstance(t, And):
            return And(tuple(walk(c, env) for c in t.conjuncts))
        if isinstance(t, Or):
            return Or(tuple(walk(d, env) for d in t.disjuncts))
        if isinstance(t, (Max, Min)):
            new = fresh(t.var)
            return type(t)(new, walk(t.body, {**env, t.var: new}))
        raise TermError(f"not a formula: {t!r}")

    return walk(f, {})


def dualize(f: Formula) -> Formula:
    """Swap each formula construct with its dual (tt/ff, box/diamond,
    and/or, max/min).  An involution; maps the safety fragment onto the
    co-safety fragment and back."""
    if isinstance(f, TT):
        return FF()
    if isinstance(f, FF):
        return TT()
    if isinstance(f, Var):
        return f
    if isinstance(f, Box):
        return Diamond(f.action, dualize(f.body))
    if isinstance(f, Diamond):
        return Box(f.action, dualize(f.body))
    if isinstance(f, And):
        return Or(tuple(dualize(c) for c in f.conjuncts))
    if isinstance(f, Or):
        return And(tuple(dualize(d) for d in f.disjuncts))
    if isinstance(f, Max):
        return Min(f.var, dualize(f.body))
    if isinstance(f, Min):
        return Max(f.var, dualize(f.body))
    raise TermError(f"not a formula: {f!r}")


def dualize_monitor(m: Monitor) -> Monitor:
    """Swap the yes and no verdicts throughout; ``end`` stays put."""
    if isinstance(m, Verdict):
        if m.value == YES:
            return Verdict(NO)
        if m.value == NO:
            return Verdict(YES)
        return m
    if isinstance(m, Var):
        return m
    if isinstance(m, Prefix):
        return Prefix(m.action, dualize_monitor(m.body))
    if isinstance(m, Sum):
        return Sum(tuple(dualize_monitor(s) for s in m.summands))
    if isinstance(m, Rec):
        return Rec(m.var, dualize_monitor(m.body))
    raise TermError(f"not a monitor term: {m!r}")


def eliminate_verdict_sums(m: Monitor, alphabet: frozenset[str]) -> Monitor:
    """Rewrite every choice with a verdict summand into an equivalent one
    without: the verdict v becomes one summand ``a.v`` per action a.

    The rewrite preserves the verdicts reachable on every trace (a
    verdict inside a choice is only observable after at least one more
    action anyway, since verdicts absorb all actions).
    """
    if not alphabet:
        raise TermError("the alphabet must be non-empty")

    def walk(t: Monitor) -> Monitor:
        if isinstance(t, (Verdict, Var)):
            return t
        if isinstance(t, Prefix):
            return Prefix(t.action, walk(t.body))
        if isinstance(t, Rec):
            return Rec(t.var, walk(t.body))
        if isinstance(t, Sum):
            out: list[Monitor] = []
            for s in t.summands:
                s = walk(s)
                if isinstance(s, Verdict):
                    out.extend(Prefix(a, s) for a in sorted(alphabet))
                else:
                    out.append(s)
            return mk_sum(out)
        raise TermError(f"not a monitor term: {t!r}")

    return walk(m)
