"""Quantified-Boolean-formula instances, brute-force oracle, and the
reduction to model checking.

A ``QbfInstance`` is a matrix over ``p1 .. p2k`` under the strictly
alternating prefix ``forall p1 exists p2 ... forall p(2k-1) exists p2k``.
``qbf_reduce`` compiles it into a model-checking instance over one agent:

* the model is a bare chain of ``2k + 2`` worlds with an empty valuation;
* updating by the i-th event model grafts a dead-end path of length exactly
  ``i`` onto the chain, while a single-event self-loop model leaves the
  structure untouched, so "p_i is true" is encoded as "some path of length
  exactly i ends in a dead end";
* the quantifier prefix becomes alternating boxes and diamonds over the
  union of the two choices, and the matrix has each ``p_i`` replaced by
  i nested diamonds around a box over falsum.

``qbf_brute`` evaluates the instance by exhaustive alternation and serves as
the independent oracle for the reduction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    And,
    Atom,
    BOT,
    Bot,
    Box,
    DynBox,
    EventModel,
    Formula,
    Not,
    PointedEvent,
    TOP,
    Top,
    Union,
    atoms_of,
    dia_power,
    dyn_dia,
)
from .kripke import EpistemicModel, PointedModel
from .syntax import parse_formula

__all__ = [
    "QbfInstance",
    "QbfReduction",
    "parse_qbf",
    "qbf_brute",
    "qbf_reduce",
    "chain_model",
    "loop_event_model",
    "path_event_model",
    "encode_variable",
    "all_matrices_k1",
    "OracleBudgetExceeded",
    "QBF_AGENT",
]

QBF_AGENT = "a"

BRUTE_VARIABLE_LIMIT = 24


class OracleBudgetExceeded(RuntimeError):
    """The brute-force oracle refused an instance beyond its budget."""


def _check_boolean(phi: Formula) -> None:
    if isinstance(phi, (Atom, Top, Bot)):
        return
    if isinstance(phi, Not):
        _check_boolean(phi.sub)
        return
    if isinstance(phi, And):
        _check_boolean(phi.left)
        _check_boolean(phi.right)
        return
    raise ValueError(f"matrix must be a plain boolean formula, found {phi!r}")


@dataclass(frozen=True)
class QbfInstance:
    """Alternation depth ``k`` and a boolean matrix over ``p1 .. p2k``."""

    k: int
    matrix: Formula

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        _check_boolean(self.matrix)
        allowed = {f"p{i}" for i in range(1, 2 * self.k + 1)}
        stray = atoms_of(self.matrix) - allowed
        if stray:
            raise ValueError(f"matrix mentions variables outside p1..p{2 * self.k}: {sorted(stray)}")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(f"p{i}" for i in range(1, 2 * self.k + 1))


def parse_qbf(text: str) -> QbfInstance:
    """Parse ``"A p1 E p2 ... : <matrix>"`` with strict A/E alternation."""
    head, sep, body = text.partition(":")
    if not sep:
        raise ValueError("expected ':' between the prefix and the matrix")
    tokens = head.split()
    if len(tokens) % 2 != 0 or not tokens:
        raise ValueError("prefix must alternate quantifiers and variables")
    if len(tokens) % 4 != 0:
        raise ValueError("prefix must end with an existential block (even variable count)")
    k2 = len(tokens) // 2
    for i in range(k2):
        quant, var = tokens[2 * i], tokens[2 * i + 1]
        expected = "A" if i % 2 == 0 else "E"
        if quant != expected:
            raise ValueError(
                f"prefix position {i + 1}: expected quantifier {expected!r}, found {quant!r}"
            )
        if var != f"p{i + 1}":
            raise ValueError(f"prefix position {i + 1}: expected variable p{i + 1}, found {var!r}")
    matrix = parse_formula(body)
    return QbfInstance(k2 // 2, matrix)


def _eval_boolean(phi: Formula, assignment: dict[str, bool]) -> bool:
    if isinstance(phi, Atom):
        return assignment.get(phi.name, False)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not _eval_boolean(phi.sub, assignment)
    if isinstance(phi, And):
        return _eval_boolean(phi.left, assignment) and _eval_boolean(phi.right, assignment)
    raise TypeError(f"not a boolean formula: {phi!r}")


def qbf_brute(instance: QbfInstance) -> bool:
    """Exhaustive alternating evaluation of the quantified formula."""
    n = 2 * instance.k
    if n > BRUTE_VARIABLE_LIMIT:
        raise OracleBudgetExceeded(f"{n} variables exceed the oracle budget of {BRUTE_VARIABLE_LIMIT}")
    assignment: dict[str, bool] = {}

    def level(i: int) -> bool:
        if i > n:
            return _eval_boolean(instance.matrix, assignment)
        var = f"p{i}"
        results = []
        for value in (False, True):
            assignment[var] = value
            results.append(level(i + 1))
        del assignment[var]
        if i % 2 == 1:  # universally quantified
            return results[0] and results[1]
        return results[0] or results[1]

    return level(1)


@dataclass(frozen=True)
class QbfReduction:
    """Model-checking instance equivalent to a QBF instance."""

    instance: QbfInstance
    model: PointedModel
    event_models: tuple[EventModel, ...]
    loop_model: EventModel
    goal: Formula


def chain_model(k: int) -> PointedModel:
    """Bare chain ``w0 -> w1 -> ... -> w(2k+1)`` with an empty valuation."""
    worlds = [f"w{j}" for j in range(2 * k + 2)]
    edges = [(f"w{j}", f"w{j + 1}") for j in range(2 * k + 1)]
    model = EpistemicModel(worlds, {QBF_AGENT: edges}, {})
    return PointedModel(model, "w0")


def loop_event_model() -> EventModel:
    """Single self-looping event with a trivial precondition: the neutral update."""
    return EventModel(
        "Eloop", ("e0",), {QBF_AGENT: {("e0", "e0")}}, {"e0": TOP}
    )


def path_event_model(i: int) -> EventModel:
    """Event model whose update grafts a dead-end path of length exactly ``i``.

    Events ``e0 .. e<i>`` form a chain ending in a dead end; ``e0`` also
    steps onto a self-looping event that shadows the existing model, so all
    other path lengths are preserved.  All preconditions are trivial.
    """
    events = [f"e{j}" for j in range(i + 1)] + ["loop"]
    edges = {(f"e{j}", f"e{j + 1}") for j in range(i)}
    edges.add(("e0", "loop"))
    edges.add(("loop", "loop"))
    pre = {e: TOP for e in events}
    return EventModel(f"E{i}", events, {QBF_AGENT: edges}, pre)


def encode_variable(i: int) -> Formula:
    """The formula standing in for ``p_i``: i diamonds around a boxed falsum."""
    return dia_power(QBF_AGENT, i, Box(QBF_AGENT, BOT))


def _substitute(phi: Formula) -> Formula:
    if isinstance(phi, Atom):
        return encode_variable(int(phi.name[1:]))
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, Not):
        return Not(_substitute(phi.sub))
    if isinstance(phi, And):
        return And(_substitute(phi.left), _substitute(phi.right))
    raise TypeError(f"not a boolean formula: {phi!r}")


def qbf_reduce(instance: QbfInstance) -> QbfReduction:
    """Build the chain model, the 2k + 1 event models, and the goal formula."""
    k = instance.k
    loop = loop_event_model()
    paths = tuple(path_event_model(i) for i in range(1, 2 * k + 1))
    goal = _substitute(instance.matrix)
    for i in range(2 * k, 0, -1):
        prog = Union(PointedEvent(paths[i - 1], "e0"), PointedEvent(loop, "e0"))
        if i % 2 == 0:  # existential: some update choice works
            goal = dyn_dia(prog, goal)
        else:  # universal: every update choice works
            goal = DynBox(prog, goal)
    return QbfReduction(instance, chain_model(k), paths, loop, goal)


def all_matrices_k1() -> list[Formula]:
    """The 16 boolean functions of (p1, p2), one canonical matrix each."""
    p1, p2 = Atom("p1"), Atom("p2")
    cases: list[Formula] = []
    for bits in itertools.product((False, True), repeat=4):
        minterms = []
        for idx, (v1, v2) in enumerate(itertools.product((False, True), repeat=2)):
            if bits[idx]:
                lit1 = p1 if v1 else Not(p1)
                lit2 = p2 if v2 else Not(p2)
                minterms.append(And(lit1, lit2))
        if not minterms:
            cases.append(And(p1, Not(p1)))
            continue
        acc = minterms[0]
        for m in minterms[1:]:
            acc = Not(And(Not(acc), Not(m)))
        cases.append(acc)
    return cases
