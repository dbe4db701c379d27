"""Concrete syntax for monitors and formulas.

Grammar, loosest to tightest: recursion binders (``rec x.`` / ``max X.`` /
``min X.``) extend maximally to the right, then choice ``+`` (monitors) and
``|`` / ``&`` (formulas), then action prefixing and the modalities, then
atoms.  ``#`` starts a line comment.  Actions may be arbitrary identifier
tokens, including numeric ones such as ``0`` and ``1``; what counts as an
action is decided by the declared alphabet, so binder and variable names
must stay out of it.

Files carry a header line ``alphabet: a, b`` followed by a single term.
"""

from __future__ import annotations

import re

from .terms import (
    NO_MARKER,
    TAU,
    VERDICTS,
    And,
    Box,
    Diamond,
    FF,
    Formula,
    Max,
    Min,
    Monitor,
    Nil,
    Or,
    Prefix,
    Rec,
    Sum,
    TT,
    Term,
    TermError,
    Var,
    Verdict,
    mk_and,
    mk_or,
    mk_sum,
)


class ParseError(TermError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<bracket>\[[A-Za-z0-9_]+\])
      | (?P<dia><[A-Za-z0-9_]+>)
      | (?P<ident>[A-Za-z0-9_]+)
      | (?P<sym>[.+&|()])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: frozenset[str], allow_marker: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet
        self.allow_marker = allow_marker
        for a in alphabet:
            if a in ("rec", "max", "min", "tt", "ff", "nil", TAU, *VERDICTS):
                raise TermError(f"alphabet contains a reserved word: {a!r}")

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def err(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> None:
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            raise self.err(f"expected {sym!r}, found {tok.text or 'end of input'!r}")
        self.next()

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == sym

    def expect_binder_name(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.err("expected a recursion variable name")
        name = tok.text
        if name in self.alphabet:
            raise self.err(f"binder name {name!r} collides with the alphabet")
        if name in ("rec", "max", "min", "tt", "ff", "nil", TAU, *VERDICTS):
            raise self.err(f"binder name {name!r} is a reserved word")
        self.next()
        return name

    # -- monitors ----------------------------------------------------------

    def monitor(self) -> Monitor:
        summands = [self.m_operand()]
        while self.at_sym("+"):
            self.next()
            summands.append(self.m_operand())
        return mk_sum(summands)

    def m_operand(self) -> Monitor:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "rec":
            self.next()
            name = self.expect_binder_name()
            self.expect_sym(".")
            return Rec(name, self.monitor())
        return self.m_prefixed()

    def m_prefixed(self) -> Monitor:
        tok = self.peek()
        if tok.kind == "bracket":
            if tok.text != NO_MARKER or not self.allow_marker:
                raise self.err(f"reserved action {tok.text!r} is not allowed here")
            self.next()
            self.expect_sym(".")
            return Prefix(NO_MARKER, self.m_after_dot())
        if tok.kind == "ident":
            name = tok.text
            if name in VERDICTS:
                self.next()
                if self.at_sym("."):
                    raise self.err("a verdict cannot be action-prefixed")
                return Verdict(name)
            if name == "nil":
                raise self.err("'nil' is a process, not a monitor")
            if name in self.alphabet:
                self.next()
                self.expect_sym(".")
                return Prefix(name, self.m_after_dot())
            if name == "rec":
                raise self.err("misplaced 'rec'")
            # A variable.  A following dot would mean it was meant as an
            # action the alphabet does not declare.
            self.next()
            if self.at_sym("."):
                raise self.err(f"unknown action {name!r}")
            return Var(name)
        if self.at_sym("("):
            self.next()
            inner = self.monitor()
            self.expect_sym(")")
            return inner
        raise self.err(f"unexpected {tok.text or 'end of input'!r} in monitor")

    def m_after_dot(self) -> Monitor:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "rec":
            return self.m_operand()
        return self.m_prefixed()

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        disjuncts = [self.f_and()]
        while self.at_sym("|"):
            self.next()
            disjuncts.append(self.f_and())
        if len(disjuncts) == 1:
            return disjuncts[0]
        return mk_or(disjuncts)

    def f_and(self) -> Formula:
        conjuncts = [self.f_unary()]
        while self.at_sym("&"):
            self.next()
            conjuncts.append(self.f_unary())
        if len(conjuncts) == 1:
            return conjuncts[0]
        return mk_and(conjuncts)

    def f_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "bracket":
            action = tok.text[1:-1]
            if action not in self.alphabet:
                raise self.err(f"unknown action {action!r}")
            self.next()
            return Box(action, self.f_unary())
        if tok.kind == "dia":
            action = tok.text[1:-1]
            if action not in self.alphabet:
                raise self.err(f"unknown action {action!r}")
            self.next()
            return Diamond(action, self.f_unary())
        if tok.kind == "ident" and tok.text in ("max", "min"):
            cls = Max if tok.text == "max" else Min
            self.next()
            name = self.expect_binder_name()
            self.expect_sym(".")
            return cls(name, self.formula())
        return self.f_atom()

    def f_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text == "tt":
                self.next()
                return TT()
            if tok.text == "ff":
                self.next()
                return FF()
            if tok.text in self.alphabet:
                raise self.err(
                    f"action {tok.text!r} cannot stand alone in a formula"
                )
            if tok.text in ("rec", "nil", TAU, *VERDICTS):
                raise self.err(f"unexpected {tok.text!r} in formula")
            self.next()
            return Var(tok.text)
        if self.at_sym("("):
            self.next()
            inner = self.formula()
            self.expect_sym(")")
            return inner
        raise self.err(f"unexpected {tok.text or 'end of input'!r} in formula")

    def finish(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise self.err(f"trailing input starting at {tok.text!r}")


def parse_monitor(
    text: str, alphabet: frozenset[str], allow_marker: bool = False
) -> Monitor:
    p = _Parser(text, alphabet, allow_marker)
    m = p.monitor()
    p.finish()
    return m


def parse_formula(text: str, alphabet: frozenset[str]) -> Formula:
    p = _Parser(text, alphabet, allow_marker=False)
    f = p.formula()
    p.finish()
    return f


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _pm_sum(t: Term) -> str:
    if isinstance(t, Sum):
        parts = []
        last = len(t.summands) - 1
        for i, s in enumerate(t.summands):
            text = _pm_operand(s)
            if isinstance(s, Rec) and i != last:
                text = f"({text})"
            parts.append(text)
        return " + ".join(parts)
    return _pm_operand(t)


def _pm_operand(t: Term) -> str:
    if isinstance(t, Verdict):
        return t.value
    if isinstance(t, Nil):
        return "nil"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Rec):
        return f"rec {t.var}. {_pm_sum(t.body)}"
    if isinstance(t, Prefix):
        body = t.body
        if isinstance(body, (Sum, Rec)):
            return f"{t.action}.({_pm_sum(body)})"
        return f"{t.action}.{_pm_operand(body)}"
    raise TermError(f"not a monitor/process term: {t!r}")


def _pf_or(t: Formula) -> str:
    if isinstance(t, Or):
        parts = []
        last = len(t.disjuncts) - 1
        for i, d in enumerate(t.disjuncts):
            text = _pf_and(d)
            if isinstance(d, (Max, Min)) and i != last:
                text = f"({text})"
            parts.append(text)
        return " | ".join(parts)
    return _pf_and(t)


def _pf_and(t: Formula) -> str:
    if isinstance(t, And):
        parts = []
        last = len(t.conjuncts) - 1
        for i, c in enumerate(t.conjuncts):
            if isinstance(c, Or):
                text = f"({_pf_or(c)})"
            elif isinstance(c, (Max, Min)) and i != last:
                text = f"({_pf_unary(c)})"
            else:
                text = _pf_unary(c)
            parts.append(text)
        return " & ".join(parts)
    return _pf_unary(t)


def _pf_unary(t: Formula) -> str:
    if isinstance(t, TT):
        return "tt"
    if isinstance(t, FF):
        return "ff"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, (Max, Min)):
        kw = "max" if isinstance(t, Max) else "min"
        return f"{kw} {t.var}. {_pf_or(t.body)}"
    if isinstance(t, (Box, Diamond)):
        wrap = "[{}]" if isinstance(t, Box) else "<{}>"
        body = t.body
        if isinstance(body, (And, Or, Max, Min)):
            return wrap.format(t.action) + f"({_pf_or(body)})"
        return wrap.format(t.action) + _pf_unary(body)
    if isinstance(t, Or):
        return f"({_pf_or(t)})"
    raise TermError(f"not a formula: {t!r}")


def print_term(t: Term) -> str:
    """Render a monitor, process or formula back to concrete syntax.

    Inverse of the parsers: ``parse(print_term(t)) == t``.
    """
    if isinstance(t, (TT, FF, Box, Diamond, And, Or, Max, Min)):
        return _pf_or(t)
    if isinstance(t, Var):
        return t.name
    return _pm_sum(t)


# ---------------------------------------------------------------------------
# Term files
# ---------------------------------------------------------------------------


def _split_file(text: str) -> tuple[frozenset[str], str]:
    lines = text.splitlines()
    alphabet: frozenset[str] | None = None
    body_start = 0
    for idx, line in enumerate(lines):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("alphabet:"):
            names = [a.strip() for a in stripped[len("alphabet:"):].split(",")]
            names = [a for a in names if a]
            if not names:
                raise TermError("empty alphabet declaration")
            alphabet = frozenset(names)
            body_start = idx + 1
            break
        raise TermError("the file must start with an 'alphabet:' line")
    if alphabet is None:
        raise TermError("missing 'alphabet:' line")
    return alphabet, "\n".join(lines[body_start:])


def parse_monitor_file(
    text: str, allow_marker: bool = False
) -> tuple[Monitor, frozenset[str]]:
    alphabet, body = _split_file(text)
    return parse_monitor(body, alphabet, allow_marker=allow_marker), alphabet


def parse_formula_file(text: str) -> tuple[Formula, frozenset[str]]:
    alphabet, body = _split_file(text)
    return parse_formula(body, alphabet), alphabet


def format_term_file(t: Term, alphabet: frozenset[str]) -> str:
    return f"alphabet: {', '.join(sorted(alphabet))}\n{print_term(t)}\n"
