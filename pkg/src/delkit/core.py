"""Core syntax: formulas, event programs, event models, and size measures.

The static language consists of atoms, boolean connectives, belief boxes
``B_a`` and dynamic boxes ``[pi]`` over event programs.  An event program is
either a pointed event model or a union of programs.  Event-model
preconditions are formulas built earlier in the inductive hierarchy, so the
three families (formulas, programs, event models) are mutually recursive and
live together in this module.

All values are immutable and hashable; structural equality is the notion of
identity used throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


def _check_id(kind: str, value: str) -> None:
    if not isinstance(value, str) or not value or any(c.isspace() for c in value):
        raise ValueError(f"{kind} id must be a nonempty string without whitespace: {value!r}")


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


class Formula:
    """Base class for formula AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self) -> None:
        _check_id("atom", self.name)


@dataclass(frozen=True)
class Top(Formula):
    """Primitive verum: true at every world."""


@dataclass(frozen=True)
class Bot(Formula):
    """Primitive falsum: false at every world."""


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    """``B_a sub``: agent ``agent`` believes ``sub``."""

    agent: str
    sub: Formula

    def __post_init__(self) -> None:
        _check_id("agent", self.agent)


@dataclass(frozen=True)
class DynBox(Formula):
    """``[prog] sub``: after every execution of ``prog``, ``sub`` holds."""

    prog: "EventProgram"
    sub: Formula


TOP = Top()
BOT = Bot()


# ---------------------------------------------------------------------------
# Event models and programs
# ---------------------------------------------------------------------------


class EventModel:
    """Finite event structure with formula preconditions.

    ``rel`` maps agents to sets of ordered event pairs; ``pre`` assigns every
    event a precondition formula.  ``agents`` may declare agents beyond those
    carrying edges (they keep empty relations but count toward the agent
    universe, which matters for announcement models).
    """

    __slots__ = ("name", "events", "rel", "pre", "agents", "_succ", "_hash")

    def __init__(
        self,
        name: str,
        events: Iterable[str],
        rel: Mapping[str, Iterable[tuple[str, str]]],
        pre: Mapping[str, Formula],
        agents: Iterable[str] = (),
    ) -> None:
        _check_id("event model name", name)
        ev = tuple(events)
        if not ev:
            raise ValueError("event model needs at least one event")
        if len(set(ev)) != len(ev):
            raise ValueError(f"duplicate event ids in {name!r}")
        for e in ev:
            _check_id("event", e)
        evset = set(ev)
        norm_rel: dict[str, frozenset[tuple[str, str]]] = {}
        for agent, pairs in rel.items():
            _check_id("agent", agent)
            ps = frozenset((a, b) for a, b in pairs)
            for a, b in ps:
                if a not in evset or b not in evset:
                    raise ValueError(f"relation pair ({a!r}, {b!r}) outside events of {name!r}")
            if ps:
                norm_rel[agent] = ps
        missing = evset - set(pre)
        if missing:
            raise ValueError(f"events without precondition in {name!r}: {sorted(missing)}")
        extra = set(pre) - evset
        if extra:
            raise ValueError(f"preconditions for unknown events in {name!r}: {sorted(extra)}")
        for e, f in pre.items():
            if not isinstance(f, Formula):
                raise TypeError(f"precondition of {e!r} is not a Formula")

        object.__setattr__(self, "name", name)
        object.__setattr__(self, "events", ev)
        object.__setattr__(self, "rel", norm_rel)
        object.__setattr__(self, "pre", {e: pre[e] for e in ev})
        object.__setattr__(self, "agents", frozenset(norm_rel) | frozenset(agents))
        succ: dict[str, dict[str, tuple[str, ...]]] = {}
        for agent, ps in norm_rel.items():
            table: dict[str, list[str]] = {}
            for a, b in ps:
                table.setdefault(a, []).append(b)
            succ[agent] = {e: tuple(sorted(bs)) for e, bs in table.items()}
        object.__setattr__(self, "_succ", succ)
        key = (
            name,
            ev,
            tuple(sorted((a, tuple(sorted(ps))) for a, ps in norm_rel.items())),
            tuple((e, pre[e]) for e in ev),
            self.agents,
        )
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("EventModel is immutable")

    def successors(self, event: str, agent: str) -> tuple[str, ...]:
        """Events reachable from ``event`` via ``agent``, in sorted order."""
        return self._succ.get(agent, {}).get(event, ())

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, EventModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.events == other.events
            and self.rel == other.rel
            and self.pre == other.pre
            and self.agents == other.agents
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"EventModel({self.name!r}, {len(self.events)} events)"


class EventProgram:
    """Base class for event programs."""

    __slots__ = ()


@dataclass(frozen=True)
class PointedEvent(EventProgram):
    """An event model with a designated event; the atomic program."""

    model: EventModel
    event: str

    def __post_init__(self) -> None:
        if self.event not in self.model.events:
            raise ValueError(f"event {self.event!r} not in model {self.model.name!r}")

    @property
    def pre(self) -> Formula:
        return self.model.pre[self.event]


@dataclass(frozen=True)
class Union(EventProgram):
    left: EventProgram
    right: EventProgram


# ---------------------------------------------------------------------------
# Size measures
# ---------------------------------------------------------------------------


def formula_size(phi: Formula) -> int:
    """Inductive formula size; atoms and the constants count 1.

    Computed with an explicit stack so that very deep formulas do not
    overflow native recursion.
    """
    total = 0
    stack: list[Formula] = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, (Atom, Top, Bot)):
            total += 1
        elif isinstance(f, (Not, Box)):
            total += 1
            stack.append(f.sub)
        elif isinstance(f, And):
            total += 1
            stack.append(f.left)
            stack.append(f.right)
        elif isinstance(f, DynBox):
            total += 1 + program_size(f.prog)
            stack.append(f.sub)
        else:
            raise TypeError(f"not a formula: {f!r}")
    return total


def program_size(prog: EventProgram) -> int:
    if isinstance(prog, PointedEvent):
        return event_model_size(prog.model)
    if isinstance(prog, Union):
        return 1 + program_size(prog.left) + program_size(prog.right)
    raise TypeError(f"not an event program: {prog!r}")


def event_model_size(model: EventModel) -> int:
    """Event count plus edge count plus total precondition size."""
    n = len(model.events)
    n += sum(len(pairs) for pairs in model.rel.values())
    n += sum(formula_size(model.pre[e]) for e in model.events)
    return n


# ---------------------------------------------------------------------------
# Derived connectives and builders
# ---------------------------------------------------------------------------


def lor(left: Formula, right: Formula) -> Formula:
    """Disjunction, expressed through the primitive connectives."""
    return Not(And(Not(left), Not(right)))


def impl(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def iff(left: Formula, right: Formula) -> Formula:
    return And(impl(left, right), impl(right, left))


def dia(agent: str, sub: Formula) -> Formula:
    """``<B_a>``: agent considers ``sub`` possible."""
    return Not(Box(agent, Not(sub)))


def dyn_dia(prog: EventProgram, sub: Formula) -> Formula:
    """``<prog>``: some execution of ``prog`` ends in a ``sub`` state."""
    return Not(DynBox(prog, Not(sub)))


def box_power(agent: str, depth: int, sub: Formula) -> Formula:
    for _ in range(depth):
        sub = Box(agent, sub)
    return sub


def dia_power(agent: str, depth: int, sub: Formula) -> Formula:
    for _ in range(depth):
        sub = dia(agent, sub)
    return sub


def conj(formulas: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; empty conjunction is top."""
    items = list(formulas)
    if not items:
        return TOP
    result = items[-1]
    for f in reversed(items[:-1]):
        result = And(f, result)
    return result


def disj(formulas: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; empty disjunction is bot."""
    items = list(formulas)
    if not items:
        return BOT
    result = items[-1]
    for f in reversed(items[:-1]):
        result = lor(f, result)
    return result


ANNOUNCEMENT_NAME = "ann"
ANNOUNCEMENT_EVENT = "e"


def announcement(pre: Formula, agents: Iterable[str]) -> EventModel:
    """Single-event model, reflexive for every given agent: a public announcement."""
    ags = sorted(set(agents))
    loop = (ANNOUNCEMENT_EVENT, ANNOUNCEMENT_EVENT)
    return EventModel(
        ANNOUNCEMENT_NAME,
        (ANNOUNCEMENT_EVENT,),
        {a: {loop} for a in ags},
        {ANNOUNCEMENT_EVENT: pre},
        agents=ags,
    )


def is_announcement(model: EventModel) -> bool:
    """Recognize models produced by :func:`announcement`."""
    if model.name != ANNOUNCEMENT_NAME or model.events != (ANNOUNCEMENT_EVENT,):
        return False
    loop = frozenset({(ANNOUNCEMENT_EVENT, ANNOUNCEMENT_EVENT)})
    return all(model.rel.get(a) == loop for a in model.agents)


# ---------------------------------------------------------------------------
# Mention collectors
# ---------------------------------------------------------------------------


def _iter_programs(prog: EventProgram) -> Iterator[PointedEvent]:
    if isinstance(prog, PointedEvent):
        yield prog
    elif isinstance(prog, Union):
        yield from _iter_programs(prog.left)
        yield from _iter_programs(prog.right)
    else:
        raise TypeError(f"not an event program: {prog!r}")


def atoms_of(phi: Formula) -> frozenset[str]:
    """Atom names mentioned anywhere, including event-model preconditions."""
    out: set[str] = set()
    _collect(phi, out, set(), None)
    return frozenset(out)


def agents_of(phi: Formula) -> frozenset[str]:
    """Agents mentioned by boxes or by embedded event models."""
    out: set[str] = set()
    _collect(phi, set(), set(), out)
    return frozenset(out)


def _collect(
    phi: Formula,
    atoms: set[str],
    models: set[EventModel],
    agents: set[str] | None,
) -> None:
    if isinstance(phi, Atom):
        atoms.add(phi.name)
    elif isinstance(phi, (Top, Bot)):
        pass
    elif isinstance(phi, Not):
        _collect(phi.sub, atoms, models, agents)
    elif isinstance(phi, And):
        _collect(phi.left, atoms, models, agents)
        _collect(phi.right, atoms, models, agents)
    elif isinstance(phi, Box):
        if agents is not None:
            agents.add(phi.agent)
        _collect(phi.sub, atoms, models, agents)
    elif isinstance(phi, DynBox):
        for pe in _iter_programs(phi.prog):
            _collect_model(pe.model, atoms, models, agents)
        _collect(phi.sub, atoms, models, agents)
    else:
        raise TypeError(f"not a formula: {phi!r}")


def _collect_model(
    model: EventModel,
    atoms: set[str],
    models: set[EventModel],
    agents: set[str] | None,
) -> None:
    if model in models:
        return
    models.add(model)
    if agents is not None:
        agents.update(model.agents)
    for e in model.events:
        _collect(model.pre[e], atoms, models, agents)


def event_models_of(phi: Formula) -> dict[str, EventModel]:
    """All event models embedded in ``phi``, keyed by name.

    Raises ``ValueError`` when two distinct models share a name, because the
    printed form of a formula refers to models by name only.
    """
    models: set[EventModel] = set()
    _collect(phi, set(), models, None)
    out: dict[str, EventModel] = {}
    for m in sorted(models, key=lambda m: m.name):
        if m.name in out and out[m.name] != m:
            raise ValueError(f"two distinct event models named {m.name!r}")
        out[m.name] = m
    return out


def has_dynamic(phi: Formula) -> bool:
    """True when some dynamic modality occurs at formula level."""
    if isinstance(phi, (Atom, Top, Bot)):
        return False
    if isinstance(phi, Not):
        return has_dynamic(phi.sub)
    if isinstance(phi, And):
        return has_dynamic(phi.left) or has_dynamic(phi.right)
    if isinstance(phi, Box):
        return has_dynamic(phi.sub)
    if isinstance(phi, DynBox):
        return True
    raise TypeError(f"not a formula: {phi!r}")
