"""Concrete formula grammar: parsing, printing, and desugaring.

Grammar (whitespace insensitive)::

    F     ::= IFF
    IFF   ::= IMP ('<->' IMP)*
    IMP   ::= OR ('->' IMP)?
    OR    ::= AND ('|' AND)*
    AND   ::= UNARY ('&' UNARY)*
    UNARY ::= '~' UNARY | 'B' '{' NAME '}' UNARY | '<' 'B' '{' NAME '}' '>' UNARY
            | '[' '!' F ']' UNARY | '[' PROG ']' UNARY | '<' PROG '>' UNARY
            | 'top' | 'bot' | NAME | '(' F ')'
    PROG  ::= SEQ ('u' SEQ)*
    SEQ   ::= PRIM (';' PRIM)*
    PRIM  ::= NAME '#' NAME | '(' PROG ')'

Binary connectives may also appear fully parenthesized; the printer always
parenthesizes them, so ``parse_formula(print_formula(f))`` returns a formula
structurally equal to ``f`` (given the event models of ``f`` in ``env`` and
the same extra agent set).

Derived forms are desugared while parsing: ``|``, ``->``, ``<->`` via the
primitive connectives, diamonds via negation, ``[p ; q] f`` into
``[p][q] f``, and ``[! psi] f`` into a dynamic box over the single-event
reflexive announcement model for ``psi``.  The agent universe used for
announcement models is inferred from the text, the referenced event models,
and the ``agents`` argument.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import (
    And,
    Atom,
    BOT,
    Bot,
    Box,
    DynBox,
    EventModel,
    EventProgram,
    Formula,
    Not,
    PointedEvent,
    TOP,
    Top,
    Union,
    agents_of,
    announcement,
    dia,
    dyn_dia,
    iff,
    impl,
    is_announcement,
    lor,
)

__all__ = ["parse_formula", "print_formula", "FormulaSyntaxError"]


class FormulaSyntaxError(ValueError):
    """Parse failure; ``position`` is a character offset into the input."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<num>[0-9][A-Za-z0-9_]*)"
    r"|(?P<iff><->)"
    r"|(?P<imp>->)"
    r"|(?P<punct>[()\[\]{}<>~&|;#!])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


_END = _Token("end", "", -1)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "name":
            tokens.append(_Token("name", m.group(), pos))
        elif m.lastgroup == "num":
            tokens.append(_Token("num", m.group(), pos))
        elif m.lastgroup == "iff":
            tokens.append(_Token("<->", "<->", pos))
        elif m.lastgroup == "imp":
            tokens.append(_Token("->", "->", pos))
        elif m.lastgroup == "punct":
            tokens.append(_Token(m.group(), m.group(), pos))
        pos = m.end()
    return tokens


def _event_model_agents(model: EventModel) -> frozenset[str]:
    out = set(model.agents)
    for e in model.events:
        out |= agents_of(model.pre[e])
    return frozenset(out)


def _infer_agents(
    tokens: list[_Token],
    env: Mapping[str, EventModel],
    extra: Iterable[str],
) -> frozenset[str]:
    agents = set(extra)
    for i, tok in enumerate(tokens):
        if (
            tok.kind == "name"
            and tok.text == "B"
            and i + 3 < len(tokens)
            and tokens[i + 1].kind == "{"
            and tokens[i + 2].kind in ("name", "num")
            and tokens[i + 3].kind == "}"
        ):
            agents.add(tokens[i + 2].text)
        if tok.kind == "name" and i + 1 < len(tokens) and tokens[i + 1].kind == "#":
            model = env.get(tok.text)
            if model is not None:
                agents |= _event_model_agents(model)
    return frozenset(agents)


# Surface programs keep the sequence operator around until a formula body is
# known, because [p ; q] only desugars at the modality.
@dataclass(frozen=True)
class _PRef:
    model: EventModel
    event: str


@dataclass(frozen=True)
class _PSeq:
    left: "_PRef | _PSeq | _PUnion"
    right: "_PRef | _PSeq | _PUnion"


@dataclass(frozen=True)
class _PUnion:
    left: "_PRef | _PSeq | _PUnion"
    right: "_PRef | _PSeq | _PUnion"


def _seq_free(prog) -> bool:
    if isinstance(prog, _PRef):
        return True
    if isinstance(prog, _PUnion):
        return _seq_free(prog.left) and _seq_free(prog.right)
    return False


def _lower(prog) -> EventProgram:
    if isinstance(prog, _PRef):
        return PointedEvent(prog.model, prog.event)
    if isinstance(prog, _PUnion):
        return Union(_lower(prog.left), _lower(prog.right))
    raise AssertionError("sequence survived lowering")


def _attach(prog, body: Formula, diamond: bool) -> Formula:
    """Build the modality ``[prog] body`` (or its diamond) over a surface program."""
    if isinstance(prog, _PSeq):
        if diamond:
            return _attach(prog.left, _attach(prog.right, body, True), True)
        return _attach(prog.left, _attach(prog.right, body, False), False)
    if isinstance(prog, _PUnion) and not _seq_free(prog):
        left = _attach(prog.left, body, diamond)
        right = _attach(prog.right, body, diamond)
        return lor(left, right) if diamond else And(left, right)
    core = _lower(prog)
    return dyn_dia(core, body) if diamond else DynBox(core, body)


class _Parser:
    def __init__(
        self,
        tokens: list[_Token],
        env: Mapping[str, EventModel],
        agents: frozenset[str],
    ) -> None:
        self.tokens = tokens
        self.env = env
        self.agents = agents
        self.i = 0

    def peek(self, ahead: int = 0) -> _Token:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else _END

    def next(self) -> _Token:
        tok = self.peek()
        if tok is _END:
            raise FormulaSyntaxError("unexpected end of input", _end_pos(self.tokens))
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            where = tok.pos if tok is not _END else _end_pos(self.tokens)
            raise FormulaSyntaxError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", where)
        self.i += 1
        return tok

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        left = self.implication()
        while self.peek().kind == "<->":
            self.next()
            right = self.implication()
            left = iff(left, right)
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.next()
            return impl(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek().kind == "|":
            self.next()
            left = lor(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.next()
            return Not(self.unary())
        if tok.kind == "name":
            if tok.text == "B" and self.peek(1).kind == "{":
                self.next()
                agent = self.box_agent()
                return Box(agent, self.unary())
            self.next()
            if tok.text == "top":
                return TOP
            if tok.text == "bot":
                return BOT
            return Atom(tok.text)
        if tok.kind == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "<":
            self.next()
            if self.peek().kind == "name" and self.peek().text == "B" and self.peek(1).kind == "{":
                self.next()
                agent = self.box_agent()
                self.expect(">")
                return dia(agent, self.unary())
            prog = self.program()
            self.expect(">")
            return _attach(prog, self.unary(), diamond=True)
        if tok.kind == "[":
            self.next()
            if self.peek().kind == "!":
                self.next()
                pre = self.formula()
                self.expect("]")
                model = announcement(pre, self.agents)
                return DynBox(PointedEvent(model, model.events[0]), self.unary())
            prog = self.program()
            self.expect("]")
            return _attach(prog, self.unary(), diamond=False)
        where = tok.pos if tok is not _END else _end_pos(self.tokens)
        raise FormulaSyntaxError(
            f"expected a formula, found {tok.text or 'end of input'!r}", where
        )

    def box_agent(self) -> str:
        self.expect("{")
        tok = self.peek()
        if tok.kind not in ("name", "num"):
            raise FormulaSyntaxError(f"expected an agent id, found {tok.text!r}", tok.pos)
        self.next()
        self.expect("}")
        return tok.text

    # -- programs ----------------------------------------------------------

    def program(self):
        left = self.sequence()
        while self.peek().kind == "name" and self.peek().text == "u":
            self.next()
            left = _PUnion(left, self.sequence())
        return left

    def sequence(self):
        left = self.program_atom()
        while self.peek().kind == ";":
            self.next()
            left = _PSeq(left, self.program_atom())
        return left

    def program_atom(self):
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            inner = self.program()
            self.expect(")")
            return inner
        if tok.kind == "name":
            self.next()
            self.expect("#")
            ev_tok = self.peek()
            if ev_tok.kind not in ("name", "num"):
                raise FormulaSyntaxError(f"expected an event id, found {ev_tok.text!r}", ev_tok.pos)
            self.next()
            event = ev_tok.text
            model = self.env.get(tok.text)
            if model is None:
                raise FormulaSyntaxError(f"unknown event model {tok.text!r}", tok.pos)
            if event not in model.events:
                raise FormulaSyntaxError(
                    f"event model {tok.text!r} has no event {event!r}", tok.pos
                )
            return _PRef(model, event)
        where = tok.pos if tok is not _END else _end_pos(self.tokens)
        raise FormulaSyntaxError(
            f"expected an event program, found {tok.text or 'end of input'!r}", where
        )


def _end_pos(tokens: list[_Token]) -> int:
    return tokens[-1].pos + len(tokens[-1].text) if tokens else 0


def parse_formula(
    text: str,
    env: Mapping[str, EventModel] | None = None,
    agents: Iterable[str] = (),
) -> Formula:
    """Parse ``text`` into a formula.

    ``env`` binds the event-model names the text may reference.  ``agents``
    adds agents to the inferred universe used for announcement models.
    """
    env = dict(env or {})
    tokens = _tokenize(text)
    parser = _Parser(tokens, env, _infer_agents(tokens, env, agents))
    result = parser.formula()
    if parser.peek() is not _END:
        tok = parser.peek()
        raise FormulaSyntaxError(f"trailing input {tok.text!r}", tok.pos)
    return result


def print_formula(phi: Formula) -> str:
    """Canonical text form, reparseable given the formula's event models."""
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Bot):
        return "bot"
    if isinstance(phi, Not):
        return "~" + print_formula(phi.sub)
    if isinstance(phi, And):
        return f"({print_formula(phi.left)} & {print_formula(phi.right)})"
    if isinstance(phi, Box):
        return f"B{{{phi.agent}}} {print_formula(phi.sub)}"
    if isinstance(phi, DynBox):
        prog = phi.prog
        if isinstance(prog, PointedEvent) and is_announcement(prog.model):
            pre = prog.model.pre[prog.event]
            return f"[! {print_formula(pre)}] {print_formula(phi.sub)}"
        return f"[{print_program(prog)}] {print_formula(phi.sub)}"
    raise TypeError(f"not a formula: {phi!r}")


def print_program(prog: EventProgram) -> str:
    if isinstance(prog, PointedEvent):
        return f"{prog.model.name}#{prog.event}"
    if isinstance(prog, Union):
        return f"({print_program(prog.left)} u {print_program(prog.right)})"
    raise TypeError(f"not an event program: {prog!r}")
