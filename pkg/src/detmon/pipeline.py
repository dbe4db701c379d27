"""End-to-end determinization of monitors, and the measurement harness.

Two independent routes arrive at a deterministic monitor:

* ``automata`` — language automaton, subset construction, minimization,
  unfold back into a monitor.  Works for any single-verdict monitor and
  is the default.
* ``equations`` — through the logic side: read the monitor back as a
  formula, determinize the formula via its equation system, synthesize
  again.  Requires the monitor to be end-free.

Both can blow up exponentially; caps keep accidents cheap and
``force=True`` lifts them.  ``bench`` runs either witness family across
a range of sizes with a per-stage timeout and reports CSV rows.
"""

from __future__ import annotations

import signal
import time
from typing import Callable

from .automata import (
    dfa_to_monitor,
    minimize_dfa,
    monitor_to_nfa,
    subset_construction,
)
from .families import ALPHABET_01E, mn_monitor, un_monitor
from .logic import determinize_formula
from .synthesis import monitor_to_formula, msf
from .terms import (
    END,
    NO,
    YES,
    Monitor,
    TermError,
    Verdict,
    dualize_monitor,
    eliminate_verdict_sums,
    size,
    verdicts_in,
    well_form,
)
from .verdicts import determinize_two_verdict  # noqa: F401  (public pipeline API)

__all__ = ["bench", "bench_csv", "determinize_monitor", "determinize_two_verdict"]


def determinize_monitor(
    m: Monitor,
    alphabet: frozenset[str],
    method: str = "automata",
    force: bool = False,
) -> Monitor:
    """A deterministic monitor flagging the same verdict on the same
    traces.  Single-verdict monitors only; use determinize_two_verdict
    when both yes and no occur."""
    if method not in ("automata", "equations"):
        raise TermError(f"unknown method {method!r}")
    m = well_form(m, alphabet)
    present = verdicts_in(m)
    if YES in present and NO in present:
        raise TermError(
            "monitor carries both verdicts; use determinize_two_verdict"
        )
    if YES not in present and NO not in present:
        return Verdict(END)  # flags nothing, deterministically
    verdict = YES if YES in present else NO

    if method == "equations":
        # Verdict summands must be expanded first: the formula reading
        # maps them onto tt/ff, which already holds on the current trace,
        # while a verdict inside a choice only flags after one more
        # action.  The expansion makes the two readings line up.
        f = monitor_to_formula(eliminate_verdict_sums(m, alphabet))
        return msf(determinize_formula(f))

    nfa = monitor_to_nfa(m, verdict, alphabet)
    det = dfa_to_monitor(minimize_dfa(subset_construction(nfa)), force=force)
    return det if verdict == YES else dualize_monitor(det)


# ---------------------------------------------------------------------------
# Benchmarks
# ---------------------------------------------------------------------------

BENCH_COLUMNS = (
    "family",
    "n",
    "monitor_size",
    "nfa_states",
    "min_dfa_states",
    "det_monitor_size",
    "t_nfa",
    "t_min",
    "t_unfold",
    "status",
)

_FAMILIES: dict[str, Callable[[int], Monitor]] = {
    "mn": mn_monitor,
    "un": un_monitor,
}


class _StageTimeout(Exception):
    pass


def _with_timeout(seconds: float, fn: Callable[[], object]) -> object:
    """Run fn under a wall-clock limit.  Uses SIGALRM when available
    (main thread on POSIX); otherwise runs unguarded."""
    if seconds <= 0 or not hasattr(signal, "setitimer"):
        return fn()

    def handler(signum, frame):  # noqa: ARG001
        raise _StageTimeout

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        return fn()
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def bench(
    family: str, min_n: int, max_n: int, timeout: float = 60.0
) -> list[dict[str, object]]:
    """Measure the determinization pipeline on a witness family.  Each
    stage runs under the timeout; a row that times out keeps whatever
    stages finished and is marked status=timeout."""
    if family not in _FAMILIES:
        raise TermError(f"unknown family {family!r}; choose from {sorted(_FAMILIES)}")
    build = _FAMILIES[family]
    rows: list[dict[str, object]] = []
    for n in range(min_n, max_n + 1):
        row: dict[str, object] = {c: "" for c in BENCH_COLUMNS}
        row["family"] = family
        row["n"] = n
        row["status"] = "ok"
        try:
            mon = build(n)
            row["monitor_size"] = size(mon)

            t0 = time.perf_counter()
            nfa = _with_timeout(
                timeout, lambda: monitor_to_nfa(mon, YES, ALPHABET_01E)
            )
            row["t_nfa"] = round(time.perf_counter() - t0, 4)
            row["nfa_states"] = len(nfa.states)

            t0 = time.perf_counter()
            dfa = _with_timeout(
                timeout, lambda: minimize_dfa(subset_construction(nfa))
            )
            row["t_min"] = round(time.perf_counter() - t0, 4)
            row["min_dfa_states"] = len(dfa.states)

            t0 = time.perf_counter()
            det = _with_timeout(timeout, lambda: dfa_to_monitor(dfa, force=True))
            row["t_unfold"] = round(time.perf_counter() - t0, 4)
            row["det_monitor_size"] = size(det)
        except _StageTimeout:
            row["status"] = "timeout"
        rows.append(row)
    return rows


def bench_csv(rows: list[dict[str, object]]) -> str:
    lines = [",".join(BENCH_COLUMNS)]
    for row in rows:
        lines.append(",".join(str(row.get(c, "")) for c in BENCH_COLUMNS))
    return "\n".join(lines) + "\n"
