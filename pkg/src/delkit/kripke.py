"""Epistemic models, product update, and the naive reference evaluator.

The evaluator materializes every product model it steps through, so its cost
is exponential in the nesting depth of dynamic modalities.  It exists as the
simple, obviously-correct semantics that the frugal checker in
:mod:`delkit.mcheck` is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .core import (
    And,
    Atom,
    Bot,
    Box,
    DynBox,
    EventModel,
    Formula,
    Not,
    PointedEvent,
    Top,
    Union,
    _check_id,
)

__all__ = [
    "EpistemicModel",
    "PointedModel",
    "product_update",
    "executable",
    "evaluate",
    "bounded_bisimilar",
    "product_worlds_built",
    "reset_product_counter",
]


class EpistemicModel:
    """Finite Kripke structure: worlds, per-agent relations, valuation."""

    __slots__ = ("worlds", "rel", "val", "agents", "_succ", "_hash")

    def __init__(
        self,
        worlds: Iterable[str],
        rel: Mapping[str, Iterable[tuple[str, str]]],
        val: Mapping[str, Iterable[str]],
        agents: Iterable[str] = (),
    ) -> None:
        ws = tuple(worlds)
        if not ws:
            raise ValueError("epistemic model needs at least one world")
        if len(set(ws)) != len(ws):
            raise ValueError("duplicate world ids")
        wset = set(ws)
        norm_rel: dict[str, frozenset[tuple[str, str]]] = {}
        for agent, pairs in rel.items():
            _check_id("agent", agent)
            ps = frozenset((a, b) for a, b in pairs)
            for a, b in ps:
                if a not in wset or b not in wset:
                    raise ValueError(f"relation pair ({a!r}, {b!r}) outside worlds")
            if ps:
                norm_rel[agent] = ps
        norm_val: dict[str, frozenset[str]] = {}
        for atom, holders in val.items():
            _check_id("atom", atom)
            hs = frozenset(holders)
            if not hs <= wset:
                raise ValueError(f"valuation of {atom!r} outside worlds")
            if hs:
                norm_val[atom] = hs

        object.__setattr__(self, "worlds", ws)
        object.__setattr__(self, "rel", norm_rel)
        object.__setattr__(self, "val", norm_val)
        object.__setattr__(self, "agents", frozenset(norm_rel) | frozenset(agents))
        succ: dict[str, dict[str, tuple[str, ...]]] = {}
        for agent, ps in norm_rel.items():
            table: dict[str, list[str]] = {}
            for a, b in ps:
                table.setdefault(a, []).append(b)
            succ[agent] = {w: tuple(sorted(bs)) for w, bs in table.items()}
        object.__setattr__(self, "_succ", succ)
        key = (
            ws,
            tuple(sorted((a, tuple(sorted(ps))) for a, ps in norm_rel.items())),
            tuple(sorted((p, tuple(sorted(hs))) for p, hs in norm_val.items())),
            self.agents,
        )
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("EpistemicModel is immutable")

    def successors(self, world: str, agent: str) -> tuple[str, ...]:
        """Worlds reachable from ``world`` via ``agent``, in sorted order."""
        return self._succ.get(agent, {}).get(world, ())

    def truth(self, world: str, atom: str) -> bool:
        return world in self.val.get(atom, ())

    def atoms(self) -> frozenset[str]:
        return frozenset(self.val)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, EpistemicModel):
            return NotImplemented
        return (
            self.worlds == other.worlds
            and self.rel == other.rel
            and self.val == other.val
            and self.agents == other.agents
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"EpistemicModel({len(self.worlds)} worlds, {len(self.agents)} agents)"


@dataclass(frozen=True)
class PointedModel:
    """An epistemic model with a designated actual world."""

    model: EpistemicModel
    world: str

    def __post_init__(self) -> None:
        if self.world not in self.model.worlds:
            raise ValueError(f"point {self.world!r} not a world of the model")


def model_size(model: EpistemicModel) -> int:
    """World count plus edge count plus total valuation size."""
    n = len(model.worlds)
    n += sum(len(ps) for ps in model.rel.values())
    n += sum(len(hs) for hs in model.val.values())
    return n


# Counter of product-model worlds materialized; lets tests verify that the
# recursive checker never builds a product.
_PRODUCT_WORLDS_BUILT = 0


def product_worlds_built() -> int:
    return _PRODUCT_WORLDS_BUILT


def reset_product_counter() -> None:
    global _PRODUCT_WORLDS_BUILT
    _PRODUCT_WORLDS_BUILT = 0


def pair_id(world: str, event: str) -> str:
    """Canonical id of a product world."""
    return f"{world}|{event}"


def executable(pointed: PointedModel, event: PointedEvent) -> bool:
    """True when the event's precondition holds at the pointed world."""
    return evaluate(pointed.model, pointed.world, event.model.pre[event.event])


def product_update(model: EpistemicModel, event_model: EventModel) -> Optional[EpistemicModel]:
    """Product of an epistemic model with an event model.

    Returns ``None`` when no (world, event) pair survives the precondition
    filter; Kripke models are nonempty by construction, so the empty product
    is a distinguished non-model value.  Callers evaluating a pointed dynamic
    box never reach it: the executability guard short-circuits first.
    """
    global _PRODUCT_WORLDS_BUILT
    survivors: list[tuple[str, str]] = []
    for w in model.worlds:
        for e in event_model.events:
            if evaluate(model, w, event_model.pre[e]):
                survivors.append((w, e))
    if not survivors:
        return None
    _PRODUCT_WORLDS_BUILT += len(survivors)
    worlds = [pair_id(w, e) for w, e in survivors]
    agents = model.agents | event_model.agents
    rel: dict[str, set[tuple[str, str]]] = {}
    for agent in agents:
        pairs: set[tuple[str, str]] = set()
        for w, e in survivors:
            ww = model.successors(w, agent)
            ee = event_model.successors(e, agent)
            if not ww or not ee:
                continue
            for v, f in survivors:
                if v in ww and f in ee:
                    pairs.add((pair_id(w, e), pair_id(v, f)))
        if pairs:
            rel[agent] = pairs
    val = {
        atom: {pair_id(w, e) for w, e in survivors if w in holders}
        for atom, holders in model.val.items()
    }
    return EpistemicModel(worlds, rel, val, agents=agents)


def evaluate(model: EpistemicModel, world: str, phi: Formula) -> bool:
    """Truth of ``phi`` at ``world``, computed by materializing products."""
    if isinstance(phi, Atom):
        return model.truth(world, phi.name)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not evaluate(model, world, phi.sub)
    if isinstance(phi, And):
        return evaluate(model, world, phi.left) and evaluate(model, world, phi.right)
    if isinstance(phi, Box):
        return all(
            evaluate(model, v, phi.sub) for v in model.successors(world, phi.agent)
        )
    if isinstance(phi, DynBox):
        prog = phi.prog
        if isinstance(prog, Union):
            return evaluate(model, world, DynBox(prog.left, phi.sub)) and evaluate(
                model, world, DynBox(prog.right, phi.sub)
            )
        if isinstance(prog, PointedEvent):
            if not evaluate(model, world, prog.model.pre[prog.event]):
                return True
            updated = product_update(model, prog.model)
            assert updated is not None  # the point itself survived
            return evaluate(updated, pair_id(world, prog.event), phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


def evaluate_pointed(pointed: PointedModel, phi: Formula) -> bool:
    return evaluate(pointed.model, pointed.world, phi)


def bounded_bisimilar(first: PointedModel, second: PointedModel, depth: int) -> bool:
    """Bisimilarity up to ``depth`` rounds of back-and-forth.

    Atom agreement is required over the union of both models' atoms; the
    back-and-forth conditions range over the union of both agent sets.
    """
    m1, m2 = first.model, second.model
    atoms = m1.atoms() | m2.atoms()
    agents = m1.agents | m2.agents
    memo: dict[tuple[str, str, int], bool] = {}

    def go(w1: str, w2: str, d: int) -> bool:
        key = (w1, w2, d)
        cached = memo.get(key)
        if cached is not None:
            return cached
        ok = all(m1.truth(w1, p) == m2.truth(w2, p) for p in atoms)
        if ok and d > 0:
            for agent in agents:
                s1 = m1.successors(w1, agent)
                s2 = m2.successors(w2, agent)
                if not all(any(go(v1, v2, d - 1) for v2 in s2) for v1 in s1):
                    ok = False
                    break
                if not all(any(go(v1, v2, d - 1) for v1 in s1) for v2 in s2):
                    ok = False
                    break
        memo[key] = ok
        return ok

    return go(first.world, second.world, depth)
