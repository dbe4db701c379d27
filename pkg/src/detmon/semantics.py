"""Small-step dynamics of monitors, processes, and monitored systems.

Three interchangeable rule systems drive recursion:

* ``"O"``   unfolds ``rec x.m`` by substitution (one tau step),
* ``"M"``   jumps from the binder to its body, and from a variable back
            to the body of its binder,
* ``"N"``   like ``"M"`` but a variable jumps to the binder itself.

All three produce the same verdicts on every trace; ``"M"`` and ``"N"``
stay within the subterms of the original monitor, which is what the
automata construction relies on.  Verdicts absorb every action of the
declared alphabet (their self-loop rule), so the alphabet is an explicit
argument throughout.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple

from .terms import (
    NO,
    TAU,
    YES,
    FreeVariableError,
    Monitor,
    Nil,
    Prefix,
    Process,
    Rec,
    Sum,
    Term,
    TermError,
    Var,
    Verdict,
    subst,
    subterms,
)

SYSTEMS = ("O", "M", "N")

DEFAULT_CLOSURE_CAP = 10_000


class CapExceeded(RuntimeError):
    """A state-space safety cap was hit; pass a higher cap or force."""


class Step(NamedTuple):
    label: str
    target: Term
    rule: str


def binder_map(m: Term) -> dict[str, Rec]:
    """Map each recursion variable to its binder.

    Binders must be unambiguous: a name may recur only when every
    occurrence is the same node (shared subterms are fine, conflicting
    ones are not)."""
    out: dict[str, Rec] = {}
    for t in subterms(m):
        if isinstance(t, Rec):
            if t.var in out and out[t.var] != t:
                raise TermError(
                    f"duplicate binder {t.var!r}; well-form the monitor first"
                )
            out[t.var] = t
    return out


# Tau successors under "O" do not depend on any context, so they are
# shared across all engines.
_O_TAU_CACHE: dict[Term, tuple[Term, ...]] = {}


class StepEngine:
    """Transition relation of one monitor (or process) under one rule system.

    Weak successor sets are cached per engine; iteration order everywhere
    is deterministic (sorted actions, discovery order for terms).
    """

    def __init__(
        self,
        alphabet: frozenset[str],
        system: str = "O",
        binders: dict[str, Rec] | None = None,
        cap: int = DEFAULT_CLOSURE_CAP,
    ):
        if system not in SYSTEMS:
            raise ValueError(f"unknown rule system {system!r}")
        self.alphabet = alphabet
        self.actions = tuple(sorted(alphabet))
        self.system = system
        self.binders = binders or {}
        self.cap = cap
        self._closure: dict[Term, tuple[Term, ...]] = {}
        self._weak: dict[tuple[Term, str], tuple[Term, ...]] = {}

    # -- single steps ------------------------------------------------------

    def steps(self, m: Term) -> list[Step]:
        if isinstance(m, Verdict):
            return [Step(a, m, "mVerd") for a in self.actions]
        if isinstance(m, Nil):
            return []
        if isinstance(m, Prefix):
            return [Step(m.action, m.body, "mAct")]
        if isinstance(m, Sum):
            out: list[Step] = []
            for idx, s in enumerate(m.summands):
                rule = "mSelL" if idx == 0 else "mSelR"
                out.extend(Step(st.label, st.target, rule) for st in self.steps(s))
            return out
        if isinstance(m, Rec):
            if self.system == "O":
                return [Step(TAU, subst(m.body, m.var, m), "mRec")]
            return [Step(TAU, m.body, "mRecF")]
        if isinstance(m, Var):
            if self.system == "O":
                return []  # stuck; closed terms never expose a variable
            binder = self.binders.get(m.name)
            if binder is None:
                raise FreeVariableError(
                    f"variable {m.name!r} has no binder in this derivation"
                )
            if self.system == "M":
                return [Step(TAU, binder.body, "mRecP")]
            return [Step(TAU, binder, "mRecB")]
        raise TermError(f"no transition rules for {m!r}")

    # -- weak closures -----------------------------------------------------

    def tau_closure(self, m: Term) -> tuple[Term, ...]:
        if self.system == "O" and m in _O_TAU_CACHE:
            return _O_TAU_CACHE[m]
        if m in self._closure:
            return self._closure[m]
        order: list[Term] = [m]
        seen: set[Term] = {m}
        i = 0
        while i < len(order):
            for st in self.steps(order[i]):
                if st.label == TAU and st.target not in seen:
                    seen.add(st.target)
                    order.append(st.target)
                    if len(order) > self.cap:
                        raise CapExceeded(
                            f"tau closure exceeded {self.cap} distinct terms"
                        )
            i += 1
        result = tuple(order)
        self._closure[m] = result
        if self.system == "O":
            _O_TAU_CACHE[m] = result
        return result

    def frontier_step(self, frontier: Iterable[Term], action: str) -> tuple[Term, ...]:
        """All weak `action`-successors of a tau-closed frontier."""
        order: list[Term] = []
        seen: set[Term] = set()
        for q in frontier:
            for st in self.steps(q):
                if st.label != action:
                    continue
                for q2 in self.tau_closure(st.target):
                    if q2 not in seen:
                        seen.add(q2)
                        order.append(q2)
        return tuple(order)

    def weak_successors(self, m: Term, action: str) -> tuple[Term, ...]:
        key = (m, action)
        if key not in self._weak:
            self._weak[key] = self.frontier_step(self.tau_closure(m), action)
        return self._weak[key]

    def derive(self, m: Term, trace: Iterable[str]) -> tuple[Term, ...]:
        frontier = self.tau_closure(m)
        for action in trace:
            frontier = self.frontier_step(frontier, action)
            if not frontier:
                break
        return frontier


def _engine(
    m: Term, alphabet: frozenset[str], system: str, cap: int
) -> StepEngine:
    binders = binder_map(m) if system in ("M", "N") else None
    return StepEngine(alphabet, system, binders, cap)


def steps(
    m: Term,
    alphabet: frozenset[str],
    system: str = "O",
    binders: dict[str, Rec] | None = None,
) -> list[Step]:
    """Strong transitions of `m`.  For "M"/"N" the binder environment is
    collected from `m` itself unless one is passed in (as a derivation
    from an enclosing monitor would)."""
    if binders is None and system in ("M", "N"):
        binders = binder_map(m)
    return StepEngine(alphabet, system, binders).steps(m)


def derive(
    m: Term,
    trace: Iterable[str],
    alphabet: frozenset[str],
    system: str = "O",
    cap: int = DEFAULT_CLOSURE_CAP,
) -> tuple[Term, ...]:
    """All terms reachable from `m` through the weak trace relation
    (tau steps freely interleaved, trailing taus included)."""
    return _engine(m, alphabet, system, cap).derive(m, trace)


def verdicts_on(
    m: Term,
    trace: Iterable[str],
    alphabet: frozenset[str],
    system: str = "O",
    cap: int = DEFAULT_CLOSURE_CAP,
) -> frozenset[str]:
    """The verdicts `m` can reach on `trace`."""
    return frozenset(
        t.value for t in derive(m, trace, alphabet, system, cap) if isinstance(t, Verdict)
    )


def is_deterministic(m: Monitor) -> bool:
    """Syntactic determinism: every choice is between action prefixes
    with pairwise distinct guards (judged on the monitor as written)."""
    for t in subterms(m):
        if isinstance(t, Sum):
            guards: list[str] = []
            for s in t.summands:
                if not isinstance(s, Prefix):
                    return False
                guards.append(s.action)
            if len(set(guards)) != len(guards):
                return False
    return True


# ---------------------------------------------------------------------------
# Finite labelled transition systems
# ---------------------------------------------------------------------------


class Lts:
    """A finite LTS over string states; ``tau`` labels silent moves."""

    def __init__(
        self,
        states: Iterable[str],
        transitions: Iterable[tuple[str, str, str]],
        init: str | None = None,
    ):
        self.states = frozenset(states)
        self.transitions = frozenset(transitions)
        for src, _, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition touches undeclared state: {src}->{dst}")
        if init is not None and init not in self.states:
            raise ValueError(f"unknown initial state {init!r}")
        self.init = init
        self._succ: dict[tuple[str, str], list[str]] = {}
        for src, label, dst in sorted(self.transitions):
            self._succ.setdefault((src, label), []).append(dst)

    def succ(self, state: str, label: str) -> list[str]:
        return self._succ.get((state, label), [])

    def labels(self) -> frozenset[str]:
        return frozenset(label for _, label, _ in self.transitions)

    def tau_closure(self, state: str) -> list[str]:
        order = [state]
        seen = {state}
        i = 0
        while i < len(order):
            for nxt in self.succ(order[i], TAU):
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
            i += 1
        return order

    def weak_succ(self, state: str, action: str) -> list[str]:
        order: list[str] = []
        seen: set[str] = set()
        for p in self.tau_closure(state):
            for q in self.succ(p, action):
                for r in self.tau_closure(q):
                    if r not in seen:
                        seen.add(r)
                        order.append(r)
        return order


_TRANSITION_RE = re.compile(r"^(\S+)\s*-(\S+?)->\s*(\S+)$")


def parse_lts(text: str) -> Lts:
    states: list[str] = []
    init: str | None = None
    transitions: list[tuple[str, str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("states:"):
            states = [s.strip() for s in line[len("states:"):].split(",") if s.strip()]
        elif line.startswith("init:"):
            init = line[len("init:"):].strip()
        else:
            m = _TRANSITION_RE.match(line)
            if m is None:
                raise ValueError(f"cannot parse LTS line: {raw!r}")
            transitions.append((m.group(1), m.group(2), m.group(3)))
    if not states:
        raise ValueError("LTS file needs a 'states:' line")
    if init is None:
        raise ValueError("LTS file needs an 'init:' line")
    return Lts(states, transitions, init)


def format_lts(lts: Lts) -> str:
    lines = [f"states: {', '.join(sorted(lts.states))}"]
    if lts.init is not None:
        lines.append(f"init: {lts.init}")
    for src, label, dst in sorted(lts.transitions):
        lines.append(f"{src} -{label}-> {dst}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Monitored systems
# ---------------------------------------------------------------------------


class MonitoredStep(NamedTuple):
    label: str
    monitor: Term
    state: str
    rule: str


def monitored_step(
    m: Term,
    state: str,
    lts: Lts,
    alphabet: frozenset[str],
    engine: StepEngine | None = None,
) -> list[MonitoredStep]:
    """One step of the instrumented pair (monitor, process state).

    The monitor mirrors every visible action of the process; if it can
    neither match the action nor move silently it falls to ``end``; both
    sides may take tau steps on their own.
    """
    if engine is None:
        engine = StepEngine(alphabet, "O")
    msteps = engine.steps(m)
    out: list[MonitoredStep] = []
    can_tau = any(st.label == TAU for st in msteps)
    for (src, label, dst) in sorted(lts.transitions):
        if src != state:
            continue
        if label == TAU:
            out.append(MonitoredStep(TAU, m, dst, "iAsyP"))
            continue
        matched = False
        for st in msteps:
            if st.label == label:
                matched = True
                out.append(MonitoredStep(label, st.target, dst, "iMon"))
        if not matched and not can_tau:
            out.append(MonitoredStep(label, Verdict("end"), dst, "iTer"))
    for st in msteps:
        if st.label == TAU:
            out.append(MonitoredStep(TAU, st.target, state, "iAsyM"))
    return out


def _reaches_verdict(
    m: Term, lts: Lts, state: str, alphabet: frozenset[str], verdict: str
) -> bool:
    engine = StepEngine(alphabet, "O")
    target = Verdict(verdict)
    frontier = [(m, state)]
    seen = {(m, state)}
    while frontier:
        nxt: list[tuple[Term, str]] = []
        for mm, ss in frontier:
            if mm == target:
                return True
            for st in monitored_step(mm, ss, lts, alphabet, engine):
                cfg = (st.monitor, st.state)
                if cfg not in seen:
                    seen.add(cfg)
                    nxt.append(cfg)
        frontier = nxt
    return False


def acc(m: Term, lts: Lts, state: str, alphabet: frozenset[str]) -> bool:
    """Can the instrumented system reach an accepting configuration?"""
    return _reaches_verdict(m, lts, state, alphabet, YES)


def rej(m: Term, lts: Lts, state: str, alphabet: frozenset[str]) -> bool:
    """Can the instrumented system reach a rejecting configuration?"""
    return _reaches_verdict(m, lts, state, alphabet, NO)


# ---------------------------------------------------------------------------
# Process dynamics (for the verdict-as-action translations)
# ---------------------------------------------------------------------------


def process_steps(p: Process) -> list[Step]:
    """Strong transitions of a process term: like a monitor but ``nil``
    is inert and there is no verdict self-loop rule."""
    if isinstance(p, (Nil, Verdict)):
        return []
    if isinstance(p, Prefix):
        return [Step(p.action, p.body, "Act")]
    if isinstance(p, Sum):
        out: list[Step] = []
        for idx, s in enumerate(p.summands):
            rule = "SelL" if idx == 0 else "SelR"
            out.extend(Step(st.label, st.target, rule) for st in process_steps(s))
        return out
    if isinstance(p, Rec):
        return [Step(TAU, subst(p.body, p.var, p), "Rec")]
    if isinstance(p, Var):
        return []
    raise TermError(f"not a process term: {p!r}")


def derive_process(
    p: Process, trace: Iterable[str], cap: int = DEFAULT_CLOSURE_CAP
) -> tuple[Process, ...]:
    def closure(terms: Iterable[Process]) -> tuple[Process, ...]:
        order = list(terms)
        seen = set(order)
        i = 0
        while i < len(order):
            for st in process_steps(order[i]):
                if st.label == TAU and st.target not in seen:
                    seen.add(st.target)
                    order.append(st.target)
                    if len(order) > cap:
                        raise CapExceeded("process closure exceeded the cap")
            i += 1
        return tuple(order)

    frontier = closure([p])
    for action in trace:
        nxt: list[Process] = []
        seen: set[Process] = set()
        for q in frontier:
            for st in process_steps(q):
                if st.label == action and st.target not in seen:
                    seen.add(st.target)
                    nxt.append(st.target)
        frontier = closure(nxt)
        if not frontier:
            break
    return frontier
