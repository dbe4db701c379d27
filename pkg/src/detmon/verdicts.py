"""Two-verdict monitors: conflict detection and determinization.

A monitor that can reach both ``yes`` and ``no`` on the *same* trace is
conflicting — irrevocability would force it to stand by contradictory
calls — and cannot be determinized meaningfully.  Conflict-free
two-verdict monitors are handled by relocating every ``no`` onto a
reserved marker action, determinizing the resulting single-verdict
monitor over the extended alphabet, and folding the marker back into a
verdict.  Because verdicts are irrevocable, a state that can emit the
marker may simply *become* ``no``, which is what the folding does.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .semantics import StepEngine, binder_map
from .terms import (
    END,
    NO,
    NO_MARKER,
    YES,
    Monitor,
    Prefix,
    Rec,
    Sum,
    Term,
    TermError,
    Var,
    Verdict,
    actions_in,
    eliminate_verdict_sums,
    mk_sum,
    subterms,
    verdicts_in,
    well_form,
)

__all__ = [
    "ConflictResult",
    "ConflictingMonitorError",
    "determinize_two_verdict",
    "is_conflicting",
    "nu",
    "nu_inverse",
]


class ConflictingMonitorError(TermError):
    def __init__(self, witness: tuple[str, ...]):
        super().__init__(
            f"monitor flags both yes and no on the trace {'.'.join(witness) or 'ε'}"
        )
        self.witness = witness


@dataclass(frozen=True)
class ConflictResult:
    conflicting: bool
    witness: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.conflicting


def nu(m: Monitor, alphabet: frozenset[str]) -> Monitor:
    """Relocate every ``no`` verdict onto the reserved marker action, so
    a two-verdict monitor becomes a yes-monitor over the extended
    alphabet: the trace w flags no exactly when w·marker is accepted.

    Verdict summands would not survive the round trip (their implicit
    any-action behaviour has no marker image), so they are rejected;
    eliminate_verdict_sums removes them losslessly first.
    """
    if NO_MARKER in alphabet:
        raise TermError(f"alphabet already contains the reserved action {NO_MARKER!r}")
    if NO_MARKER in actions_in(m):
        raise TermError(f"monitor already uses the reserved action {NO_MARKER!r}")
    for t in subterms(m):
        if isinstance(t, Sum) and any(isinstance(s, Verdict) for s in t.summands):
            raise TermError("verdict summand: run eliminate_verdict_sums first")

    def go(t: Monitor) -> Monitor:
        if isinstance(t, Verdict):
            return Prefix(NO_MARKER, Verdict(YES)) if t.value == NO else t
        if isinstance(t, Prefix):
            return Prefix(t.action, go(t.body))
        if isinstance(t, Sum):
            return mk_sum([go(s) for s in t.summands])
        if isinstance(t, Rec):
            return Rec(t.var, go(t.body))
        return t

    return go(m)


def nu_inverse(m: Monitor) -> Monitor:
    """Undo the marker relocation.  Exact inverse on images of nu; on
    other marker-carrying monitors it still folds each marker prefix
    back into ``no`` but may then produce verdict summands."""

    def go(t: Monitor) -> Monitor:
        if isinstance(t, Prefix):
            if t.action == NO_MARKER:
                if t.body != Verdict(YES):
                    raise TermError(
                        f"marker action {NO_MARKER!r} must be followed by yes"
                    )
                return Verdict(NO)
            return Prefix(t.action, go(t.body))
        if isinstance(t, Sum):
            return mk_sum([go(s) for s in t.summands])
        if isinstance(t, Rec):
            return Rec(t.var, go(t.body))
        return t

    return go(m)


def is_conflicting(m: Monitor, alphabet: frozenset[str]) -> ConflictResult:
    """Can any single trace be flagged with both verdicts?  Breadth-first
    product walk of the monitor against itself; the witness, when there
    is one, is a shortest conflicted trace."""
    engine = StepEngine(alphabet, "N", binder_map(m))

    def conflicted(pair: tuple[Term, Term]) -> bool:
        p, q = pair
        return {p, q} == {Verdict(YES), Verdict(NO)}

    start_terms = engine.tau_closure(m)
    parents: dict[tuple[Term, Term], tuple[tuple[Term, Term], str] | None] = {}
    queue: deque[tuple[Term, Term]] = deque()
    for p in start_terms:
        for q in start_terms:
            if (p, q) not in parents:
                parents[(p, q)] = None
                queue.append((p, q))
    while queue:
        pair = queue.popleft()
        if conflicted(pair):
            word: list[str] = []
            cur: tuple[Term, Term] | None = pair
            while parents[cur] is not None:
                cur, a = parents[cur]
                word.append(a)
            return ConflictResult(True, tuple(reversed(word)))
        p, q = pair
        for a in sorted(alphabet):
            for p2 in engine.weak_successors(p, a):
                for q2 in engine.weak_successors(q, a):
                    if (p2, q2) not in parents:
                        parents[(p2, q2)] = (pair, a)
                        queue.append((p2, q2))
    return ConflictResult(False)


def _fold_marker(t: Monitor) -> Monitor:
    """Bottom-up: marker prefixes become ``no``, and anything that can
    immediately go ``no`` is ``no`` (sound because the source monitor is
    conflict-free and verdicts are irrevocable)."""
    if isinstance(t, Prefix):
        if t.action == NO_MARKER:
            assert t.body == Verdict(YES)
            return Verdict(NO)
        return Prefix(t.action, _fold_marker(t.body))
    if isinstance(t, Sum):
        folded = [_fold_marker(s) for s in t.summands]
        if any(s == Verdict(NO) for s in folded):
            return Verdict(NO)
        return mk_sum(folded)
    if isinstance(t, Rec):
        body = _fold_marker(t.body)
        if body == Verdict(NO):
            return body
        return Rec(t.var, body)
    return t


def determinize_two_verdict(
    m: Monitor, alphabet: frozenset[str], force: bool = False
) -> Monitor:
    """Determinize a conflict-free monitor that may carry both verdicts.

    Raises ConflictingMonitorError (with a shortest conflicted trace)
    when the two verdicts can collide.  Single-verdict monitors are
    passed straight to the ordinary pipeline.
    """
    from .pipeline import determinize_monitor  # import cycle: pipeline uses this module

    m = well_form(m, alphabet)
    conflict = is_conflicting(m, alphabet)
    if conflict:
        raise ConflictingMonitorError(conflict.witness or ())
    present = verdicts_in(m)
    if not (YES in present and NO in present):
        return determinize_monitor(m, alphabet, force=force)

    prepared = nu(eliminate_verdict_sums(m, alphabet), alphabet)
    extended = frozenset(alphabet | {NO_MARKER})
    det = determinize_monitor(prepared, extended, force=force)
    out = _fold_marker(det)
    assert NO_MARKER not in actions_in(out)
    return out
