"""Deciding when two monitors are interchangeable.

Two monitors are verdict-equivalent when they flag exactly the same
traces with exactly the same verdicts.  For single-verdict monitors this
reduces to language equality of their acceptance automata, which is
decided exactly (and yields a shortest distinguishing trace when it
fails).  `bounded_equiv` is the cheap cousin: compare verdict sets on
every trace up to a length bound.

`simple_traces` enumerates the traces a monitor can follow without ever
taking a recursion backedge; any flagged trace outside that set must
pump, and `pump_check` exhibits the decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import _monitor_nfa, distinguishing_word, language_equiv
from .semantics import StepEngine, binder_map, verdicts_on
from .terms import (
    END,
    NO,
    YES,
    Monitor,
    Nil,
    Prefix,
    Rec,
    Sum,
    Term,
    Var,
    Verdict,
)


@dataclass(frozen=True)
class EquivResult:
    equivalent: bool
    witness: tuple[str, ...] | None = None
    verdict: str | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def verdict_equiv(
    m1: Monitor,
    m2: Monitor,
    alphabet: frozenset[str],
    include_end: bool = False,
) -> EquivResult:
    """Exact verdict equivalence, one acceptance automaton per verdict.

    The `end` verdict marks deliberate abdication and is usually not an
    observable outcome worth separating on; pass include_end=True to
    compare it as well.
    """
    verdicts = (YES, NO, END) if include_end else (YES, NO)
    for v in verdicts:
        n1, _ = _monitor_nfa(m1, alphabet, v)
        n2, _ = _monitor_nfa(m2, alphabet, v)
        if not language_equiv(n1, n2):
            return EquivResult(False, distinguishing_word(n1, n2), v)
    return EquivResult(True)


def bounded_equiv(
    m1: Monitor,
    m2: Monitor,
    max_len: int,
    alphabet: frozenset[str],
    system: str = "N",
) -> bool:
    """Do the two monitors produce identical verdict sets on every trace
    of length at most max_len?  A depth-bounded joint walk, so no
    completeness guarantee beyond the bound."""
    e1 = StepEngine(alphabet, system, binder_map(m1))
    e2 = StepEngine(alphabet, system, binder_map(m2))

    def close(engine: StepEngine, frontier: frozenset[Term]) -> frozenset[Term]:
        out: set[Term] = set()
        for t in frontier:
            out.update(engine.tau_closure(t))
        return frozenset(out)

    def flags(frontier: frozenset[Term]) -> frozenset[str]:
        return frozenset(t.value for t in frontier if isinstance(t, Verdict))

    def step(engine: StepEngine, frontier: frozenset[Term], a: str) -> frozenset[Term]:
        out: set[Term] = set()
        for t in frontier:
            out.update(engine.weak_successors(t, a))
        return frozenset(out)

    seen: set[tuple[frozenset[Term], frozenset[Term], int]] = set()

    def go(f1: frozenset[Term], f2: frozenset[Term], remaining: int) -> bool:
        if flags(f1) != flags(f2):
            return False
        if remaining == 0:
            return True
        key = (f1, f2, remaining)
        if key in seen:
            return True
        seen.add(key)
        for a in sorted(alphabet):
            if not go(step(e1, f1, a), step(e2, f2, a), remaining - 1):
                return False
        return True

    return go(close(e1, frozenset({m1})), close(e2, frozenset({m2})), max_len)


def simple_traces(m: Monitor, max_len: int) -> frozenset[tuple[str, ...]]:
    """All traces the monitor can exhibit without ever following a
    recursion variable back to its binder.  Prefix-closed and finite: at
    most size(m) traces, none longer than height(m)."""
    out: set[tuple[str, ...]] = {()}

    def go(t: Term, trace: tuple[str, ...]) -> None:
        if isinstance(t, (Verdict, Var, Nil)):
            return
        if isinstance(t, Rec):
            go(t.body, trace)
        elif isinstance(t, Prefix):
            if len(trace) < max_len:
                nxt = trace + (t.action,)
                out.add(nxt)
                go(t.body, nxt)
        elif isinstance(t, Sum):
            for s in t.summands:
                go(s, trace)

    go(m, ())
    return frozenset(out)


def pump_check(
    m: Monitor,
    trace: Sequence[str],
    alphabet: frozenset[str],
) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]] | None:
    """For a trace outside the simple set, find a split x·u·z whose
    middle can be repeated (checked for 0..3 copies) without changing
    the verdicts.  Returns None for simple traces or if no verified
    split exists."""
    trace = tuple(trace)
    if trace in simple_traces(m, len(trace)):
        return None
    base = verdicts_on(m, trace, alphabet)
    n = len(trace)
    for ulen in range(1, n + 1):
        for start in range(0, n - ulen + 1):
            x = trace[:start]
            u = trace[start : start + ulen]
            z = trace[start + ulen :]
            if all(
                verdicts_on(m, x + u * i + z, alphabet) == base for i in (0, 1, 2, 3)
            ):
                return (x, u, z)
    return None
