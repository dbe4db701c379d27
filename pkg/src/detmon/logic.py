"""Recursive modal formulas over finite LTSs, and their equation systems.

A safety formula can be flattened into a system of equations whose
right-hand sides are *standard*: a conjunction of box modalities over
system variables plus free variables, or ``ff``.  In that shape the
system can be determinized subset-style (merging the targets of equal
actions), and folded back into a single formula by eliminating equations
from the last to the first.  Greatest fixpoints are solved for each
equation in turn, which by Bekic's principle agrees with solving them
simultaneously; both solvers are provided.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .semantics import Lts
from .syntax import parse_formula, print_term
from .terms import (
    And,
    Box,
    Diamond,
    FF,
    Formula,
    FragmentError,
    Max,
    Min,
    Or,
    TT,
    TermError,
    Var,
    binder_names,
    dualize,
    free_vars,
    is_chml,
    is_shml,
    mk_and,
    subst_formula,
    subterms,
    uniquify_formula,
)

# ---------------------------------------------------------------------------
# Denotational semantics
# ---------------------------------------------------------------------------


def eval_formula(
    f: Formula, lts: Lts, env: dict[str, frozenset[str]] | None = None
) -> frozenset[str]:
    """The set of LTS states satisfying `f`.

    Modalities are weak (tau-absorbing).  Variables missing from `env`
    denote the empty set.
    """
    env = env or {}
    states = lts.states

    def ev(g: Formula, rho: dict[str, frozenset[str]]) -> frozenset[str]:
        if isinstance(g, TT):
            return states
        if isinstance(g, FF):
            return frozenset()
        if isinstance(g, Var):
            return rho.get(g.name, frozenset())
        if isinstance(g, Box):
            sat = ev(g.body, rho)
            return frozenset(
                p for p in states if all(q in sat for q in lts.weak_succ(p, g.action))
            )
        if isinstance(g, Diamond):
            sat = ev(g.body, rho)
            return frozenset(
                p for p in states if any(q in sat for q in lts.weak_succ(p, g.action))
            )
        if isinstance(g, And):
            out = states
            for c in g.conjuncts:
                out &= ev(c, rho)
            return out
        if isinstance(g, Or):
            out: frozenset[str] = frozenset()
            for d in g.disjuncts:
                out |= ev(d, rho)
            return out
        if isinstance(g, (Max, Min)):
            cur = states if isinstance(g, Max) else frozenset()
            while True:
                nxt = ev(g.body, {**rho, g.var: cur})
                if nxt == cur:
                    return cur
                cur = nxt
        raise TermError(f"not a formula: {g!r}")

    return ev(f, dict(env))


# ---------------------------------------------------------------------------
# Equation systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquationSystem:
    """Named equations with a distinguished principal variable.

    Equations are ordered; `free` lists variables the right-hand sides
    may mention without defining.
    """

    equations: tuple[tuple[str, Formula], ...]
    principal: str
    free: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.equations]
        if len(set(names)) != len(names):
            raise TermError("duplicate equation names")
        if self.principal not in names:
            raise TermError(f"principal {self.principal!r} is not defined")
        if self.free & set(names):
            raise TermError("free variables shadow equation names")
        defined = set(names) | self.free
        for n, f in self.equations:
            loose = free_vars(f) - defined
            if loose:
                raise TermError(
                    f"equation {n} mentions undeclared variables {sorted(loose)}"
                )

    def rhs(self, name: str) -> Formula:
        for n, f in self.equations:
            if n == name:
                return f
        raise KeyError(name)

    def names(self) -> list[str]:
        return [n for n, _ in self.equations]


def solve_system(
    sys: EquationSystem, lts: Lts, env: dict[str, frozenset[str]] | None = None
) -> dict[str, frozenset[str]]:
    """Solve equation by equation: the first variable's value is the
    greatest S such that, with the rest of the system solved under
    X_1 = S, the first right-hand side denotes S again."""
    states = lts.states

    def rec(
        eqs: tuple[tuple[str, Formula], ...], rho: dict[str, frozenset[str]]
    ) -> dict[str, frozenset[str]]:
        if not eqs:
            return {}
        (x1, f1), rest = eqs[0], eqs[1:]
        cur = states
        while True:
            sub = rec(rest, {**rho, x1: cur})
            nxt = eval_formula(f1, lts, {**rho, x1: cur, **sub})
            if nxt == cur:
                break
            cur = nxt
        sub = rec(rest, {**rho, x1: cur})
        return {x1: cur, **sub}

    return rec(sys.equations, dict(env or {}))


def solve_system_simultaneous(
    sys: EquationSystem, lts: Lts, env: dict[str, frozenset[str]] | None = None
) -> dict[str, frozenset[str]]:
    """Solve all equations as one simultaneous greatest fixpoint."""
    rho = dict(env or {})
    vals = {n: lts.states for n, _ in sys.equations}
    while True:
        nxt = {
            n: eval_formula(f, lts, {**rho, **vals}) for n, f in sys.equations
        }
        if nxt == vals:
            return vals
        vals = nxt


def eval_system(
    sys: EquationSystem, lts: Lts, env: dict[str, frozenset[str]] | None = None
) -> frozenset[str]:
    """States satisfying the principal variable of the solved system."""
    return solve_system(sys, lts, env)[sys.principal]


# ---------------------------------------------------------------------------
# Standard form
# ---------------------------------------------------------------------------


def _top_ok(g: Formula) -> bool:
    """No variable occurs unguarded below anything but conjunction or
    disjunction nodes."""

    def walk(t: Formula, top: bool) -> bool:
        if isinstance(t, Var):
            return top
        if isinstance(t, (TT, FF)):
            return True
        if isinstance(t, (Box, Diamond)):
            return True  # guarded below here
        if isinstance(t, And):
            return all(walk(c, top) for c in t.conjuncts)
        if isinstance(t, Or):
            return all(walk(d, top) for d in t.disjuncts)
        if isinstance(t, (Max, Min)):
            return walk(t.body, False)
        raise TermError(f"not a formula: {t!r}")

    return walk(g, True)


def is_standard_form(f: Formula) -> bool:
    """Every unguarded variable occurrence — in the formula itself and in
    each fixpoint body — sits at top level, as a direct conjunct."""
    roots = [f] + [t.body for t in subterms(f) if isinstance(t, (Max, Min))]
    return all(_top_ok(r) for r in roots)


def _hoist(f: Formula) -> tuple[Formula, tuple[str, ...]]:
    """Split f into (psi, tops) with f equivalent to psi AND tops, where
    psi has no unguarded variables.  Rewrites recursively so the
    invariant holds inside boxes and fixpoint bodies too."""
    if isinstance(f, (TT, FF)):
        return f, ()
    if isinstance(f, Var):
        return TT(), (f.name,)
    if isinstance(f, Box):
        return Box(f.action, _standardize_shml(f.body)), ()
    if isinstance(f, And):
        psis: list[Formula] = []
        tops: list[str] = []
        for c in f.conjuncts:
            psi, t = _hoist(c)
            psis.append(psi)
            tops.extend(x for x in t if x not in tops)
        return mk_and(psis), tuple(tops)
    if isinstance(f, Max):
        psi, tops = _hoist(f.body)
        outs = tuple(x for x in tops if x != f.var)
        if not outs:
            # Nothing to pull out of the binder; f.var as a top-level
            # conjunct of its own body is redundant and dropped.
            return Max(f.var, psi), ()
        inner = Max(f.var, mk_and([psi, *(Var(x) for x in outs)]))
        if f.var in free_vars(psi):
            psi = subst_formula(psi, {f.var: inner})
        return psi, outs
    raise FragmentError(f"not a safety formula: {f!r}")


def _standardize_shml(f: Formula) -> Formula:
    psi, tops = _hoist(f)
    return mk_and([psi, *(Var(x) for x in tops)])


def to_standard_form(f: Formula) -> Formula:
    """An equivalent formula in standard form.

    Unguarded variables under a fixpoint are hoisted out by unfolding
    the binder around them once.
    """
    if is_shml(f):
        return _standardize_shml(f)
    if is_chml(f):
        return dualize(_standardize_shml(dualize(f)))
    raise FragmentError("standard form is defined per fragment; mixed formula")


# ---------------------------------------------------------------------------
# Formula -> equation system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardRhs:
    is_ff: bool
    boxes: tuple[tuple[str, str], ...]  # (action, target equation)
    frees: tuple[str, ...]


def _standard_rhs(
    name: str, f: Formula, defined: set[str], free: frozenset[str]
) -> StandardRhs:
    if isinstance(f, FF):
        return StandardRhs(True, (), ())
    conjuncts = f.conjuncts if isinstance(f, And) else (f,)
    boxes: list[tuple[str, str]] = []
    frees: list[str] = []
    for c in conjuncts:
        if isinstance(c, TT):
            continue
        if isinstance(c, Box) and isinstance(c.body, Var) and c.body.name in defined:
            boxes.append((c.action, c.body.name))
        elif isinstance(c, Var) and c.name in free:
            if c.name not in frees:
                frees.append(c.name)
        else:
            raise TermError(
                f"equation {name} is not in standard form: "
                f"offending conjunct {print_term(c)}"
            )
    return StandardRhs(False, tuple(boxes), tuple(frees))


def is_standard_form_system(sys: EquationSystem) -> bool:
    defined = set(sys.names())
    try:
        for n, f in sys.equations:
            _standard_rhs(n, f, defined, sys.free)
    except TermError:
        return False
    return True


def is_deterministic_form_system(sys: EquationSystem) -> bool:
    """Standard, and no right-hand side boxes the same action twice."""
    defined = set(sys.names())
    try:
        for n, f in sys.equations:
            rhs = _standard_rhs(n, f, defined, sys.free)
            actions = [a for a, _ in rhs.boxes]
            if len(set(actions)) != len(actions):
                return False
    except TermError:
        return False
    return True


def formula_to_system(f: Formula) -> EquationSystem:
    """Flatten a safety formula into a standard-form equation system.

    Fixpoint binders become equations named after their variable;
    auxiliary equations are introduced bottom-up, unreachable ones are
    pruned, and the survivors are renamed X_1, X_2, ... in the order
    they are first referenced from the principal equation.
    """
    if not is_shml(f):
        raise FragmentError("only safety formulas flatten to box-conjunction systems")
    f = uniquify_formula(f)
    f = _standardize_shml(f)
    f = uniquify_formula(f)  # hoisting can duplicate a binder

    eqs: list[tuple[str, Formula]] = []
    index: dict[str, int] = {}
    counter = 0

    def add(name: str, rhs: Formula) -> None:
        index[name] = len(eqs)
        eqs.append((name, rhs))

    def fresh_add(rhs: Formula) -> str:
        nonlocal counter
        counter += 1
        name = f"%{counter}"  # internal; canonicalised below
        add(name, rhs)
        return name

    def rhs_of(name: str) -> Formula:
        return eqs[index[name]][1]

    def merge_unguarded(var: str, replacement: Formula) -> None:
        """Replace `var` occurring as a direct conjunct by the conjuncts
        of `replacement`, in every equation built so far."""
        for i, (n, rhs) in enumerate(eqs):
            conjuncts = rhs.conjuncts if isinstance(rhs, And) else (rhs,)
            if not any(isinstance(c, Var) and c.name == var for c in conjuncts):
                continue
            new = mk_and(
                replacement if isinstance(c, Var) and c.name == var else c
                for c in conjuncts
            )
            eqs[i] = (n, new)

    def build(g: Formula) -> str:
        if isinstance(g, (TT, FF, Var)):
            return fresh_add(g)
        if isinstance(g, Box):
            sub = build(g.body)
            return fresh_add(Box(g.action, Var(sub)))
        if isinstance(g, And):
            principals = [build(c) for c in g.conjuncts]
            return fresh_add(mk_and(rhs_of(p) for p in principals))
        if isinstance(g, Max):
            sub = build(g.body)
            f1 = rhs_of(sub)
            add(g.var, f1)
            merge_unguarded(g.var, f1)
            return g.var
        raise FragmentError(f"not a standard safety formula: {g!r}")

    principal = build(f)

    # Prune equations unreachable from the principal.
    def references(rhs: Formula) -> list[str]:
        out: list[str] = []
        conjuncts = rhs.conjuncts if isinstance(rhs, And) else (rhs,)
        for c in conjuncts:
            if isinstance(c, Box) and isinstance(c.body, Var):
                out.append(c.body.name)
            elif isinstance(c, Var):
                out.append(c.name)
        return out

    live: set[str] = set()
    stack = [principal]
    while stack:
        n = stack.pop()
        if n in live or n not in index:
            continue
        live.add(n)
        stack.extend(references(rhs_of(n)))

    # Canonical names, assigned in first-reference order from the principal.
    frees = {
        v
        for n in live
        for v in references(rhs_of(n))
        if v not in index
    }
    taken = set(frees)
    renames: dict[str, str] = {}

    def canonical(name: str) -> str:
        if name in renames:
            return renames[name]
        if name == principal:
            new = "X" if (principal.startswith("%") and "X" not in taken) else principal
            if new.startswith("%"):
                new = "X"
                while new in taken:
                    new += "_0"
        else:
            i = len(renames)
            new = f"X_{i}"
            while new in taken:
                new += "_0"
        taken.add(new)
        renames[name] = new
        return new

    ordered: list[str] = []
    canonical(principal)
    queue = deque([principal])
    seen = {principal}
    while queue:
        n = queue.popleft()
        ordered.append(n)
        for ref in references(rhs_of(n)):
            if ref in index and ref in live and ref not in seen:
                seen.add(ref)
                canonical(ref)
                queue.append(ref)

    def rename_rhs(rhs: Formula) -> Formula:
        conjuncts = rhs.conjuncts if isinstance(rhs, And) else (rhs,)
        out: list[Formula] = []
        for c in conjuncts:
            if isinstance(c, Box) and isinstance(c.body, Var) and c.body.name in renames:
                out.append(Box(c.action, Var(renames[c.body.name])))
            else:
                out.append(c)
        return mk_and(out)

    final = tuple((renames[n], rename_rhs(rhs_of(n))) for n in ordered)
    return EquationSystem(final, renames[principal], frozenset(frees))


# ---------------------------------------------------------------------------
# Determinizing a system
# ---------------------------------------------------------------------------


def determinize_system(sys: EquationSystem) -> EquationSystem:
    """Subset-merge a standard system: wherever a right-hand side boxes
    the same action toward several variables, the targets fuse into one
    fresh variable standing for the set, defined as the conjunction of
    its members' equations (ff absorbing).  Original equations stay,
    rewritten; fused equations are appended as they first arise.
    """
    names = sys.names()
    defined = set(names)
    pos = {n: i for i, n in enumerate(names)}
    parsed = [
        _standard_rhs(n, f, defined, sys.free) for n, f in sys.equations
    ]

    def info(Q: frozenset[int]) -> tuple[bool, list[tuple[str, frozenset[int]]], list[str]]:
        if any(parsed[i].is_ff for i in Q):
            return True, [], []
        actions: list[str] = []
        targets: dict[str, set[int]] = {}
        frees: list[str] = []
        for i in sorted(Q):
            for a, t in parsed[i].boxes:
                if a not in targets:
                    targets[a] = set()
                    actions.append(a)
                targets[a].add(pos[t])
            for y in parsed[i].frees:
                if y not in frees:
                    frees.append(y)
        return False, [(a, frozenset(targets[a])) for a in actions], frees

    taken = set(names) | set(sys.free)
    subset_name: dict[frozenset[int], str] = {}
    queue: deque[frozenset[int]] = deque()

    def name_of(Q: frozenset[int]) -> str:
        if len(Q) == 1:
            return names[next(iter(Q))]
        if Q not in subset_name:
            cand = "X_" + "_".join(str(i) for i in sorted(Q))
            while cand in taken:
                cand += "_"
            taken.add(cand)
            subset_name[Q] = cand
            queue.append(Q)
        return subset_name[Q]

    def rebuild(Q: frozenset[int]) -> Formula:
        is_ff, boxes, frees = info(Q)
        if is_ff:
            return FF()
        return mk_and(
            [Box(a, Var(name_of(T))) for a, T in boxes]
            + [Var(y) for y in frees]
        )

    out: list[tuple[str, Formula]] = [
        (names[i], rebuild(frozenset({i}))) for i in range(len(names))
    ]
    while queue:
        Q = queue.popleft()
        out.append((subset_name[Q], rebuild(Q)))
    return EquationSystem(tuple(out), sys.principal, sys.free)


# ---------------------------------------------------------------------------
# System -> formula
# ---------------------------------------------------------------------------


def system_to_formula(sys: EquationSystem) -> Formula:
    """Fold a deterministic-form system back into one formula by
    eliminating equations from the last upward: each variable becomes a
    greatest fixpoint over its right-hand side with all later variables
    already replaced."""
    if not is_deterministic_form_system(sys):
        raise TermError("the system is not in deterministic form")
    eqs = list(sys.equations)
    eqs.sort(key=lambda e: e[0] != sys.principal)  # principal first, stable
    phis: dict[str, Formula] = {}
    for i in range(len(eqs) - 1, -1, -1):
        name, g = eqs[i]
        for j in range(len(eqs) - 1, i, -1):
            later = eqs[j][0]
            g = subst_formula(g, {later: phis[later]})
        phis[name] = Max(name, g) if name in free_vars(g) else g
    return phis[eqs[0][0]]


def determinize_formula(f: Formula) -> Formula:
    """End-to-end determinization on the formula side: flatten,
    subset-merge, fold back.  Co-safety formulas run through duality."""
    if is_shml(f):
        return system_to_formula(determinize_system(formula_to_system(f)))
    if is_chml(f):
        return dualize(system_to_formula(determinize_system(formula_to_system(dualize(f)))))
    raise FragmentError("determinization is defined per fragment; mixed formula")


def is_deterministic_form(f: Formula) -> bool:
    """Inside every conjunction, distinct members must be boxes over
    distinct actions or free variables of the whole formula (dually for
    disjunctions with diamonds)."""
    outer_free = free_vars(f)

    def members_ok(members: tuple[Formula, ...], modality: type) -> bool:
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if a == b:
                    continue
                if (
                    isinstance(a, Var)
                    and a.name in outer_free
                    or isinstance(b, Var)
                    and b.name in outer_free
                ):
                    continue
                if (
                    isinstance(a, modality)
                    and isinstance(b, modality)
                    and a.action != b.action
                ):
                    continue
                return False
        return True

    for t in subterms(f):
        if isinstance(t, And) and not members_ok(t.conjuncts, Box):
            return False
        if isinstance(t, Or) and not members_ok(t.disjuncts, Diamond):
            return False
    return True


# ---------------------------------------------------------------------------
# Equation system files
# ---------------------------------------------------------------------------


def parse_equation_system(text: str) -> tuple[EquationSystem, frozenset[str]]:
    alphabet: frozenset[str] | None = None
    principal: str | None = None
    free: frozenset[str] = frozenset()
    raw_eqs: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet:"):
            alphabet = frozenset(
                a.strip() for a in line[len("alphabet:"):].split(",") if a.strip()
            )
        elif line.startswith("principal:"):
            principal = line[len("principal:"):].strip()
        elif line.startswith("free:"):
            free = frozenset(
                v.strip() for v in line[len("free:"):].split(",") if v.strip()
            )
        elif "=" in line:
            name, rhs = line.split("=", 1)
            raw_eqs.append((name.strip(), rhs.strip()))
        else:
            raise TermError(f"cannot parse equation line: {raw!r}")
    if alphabet is None:
        raise TermError("equation system file needs an 'alphabet:' line")
    if principal is None:
        raise TermError("equation system file needs a 'principal:' line")
    eqs = tuple(
        (name, parse_formula(rhs, alphabet)) for name, rhs in raw_eqs
    )
    return EquationSystem(eqs, principal, free), alphabet


def format_equation_system(sys: EquationSystem, alphabet: frozenset[str]) -> str:
    lines = [f"alphabet: {', '.join(sorted(alphabet))}", f"principal: {sys.principal}"]
    if sys.free:
        lines.append(f"free: {', '.join(sorted(sys.free))}")
    for name, f in sys.equations:
        lines.append(f"{name} = {print_term(f)}")
    return "\n".join(lines) + "\n"
