"""Formula and event-model basics: sizes, builders, collectors, validation."""

import random

import pytest

from delkit.core import (
    And,
    Atom,
    BOT,
    Box,
    DynBox,
    EventModel,
    Not,
    PointedEvent,
    TOP,
    Union,
    announcement,
    atoms_of,
    agents_of,
    conj,
    dia,
    disj,
    event_model_size,
    event_models_of,
    formula_size,
    has_dynamic,
    iff,
    impl,
    is_announcement,
    lor,
    program_size,
)

from randgen import InstanceGen


def test_formula_size_base_cases():
    assert formula_size(Atom("p")) == 1
    assert formula_size(TOP) == 1
    assert formula_size(BOT) == 1
    assert formula_size(Box("a", Atom("p"))) == 2
    assert formula_size(Not(Atom("p"))) == 2
    assert formula_size(And(Atom("p"), Atom("q"))) == 3


def test_formula_size_dynamic_box_counts_event_model():
    # single reflexive trivial event: 1 event + 1 edge + size-1 precondition
    ann = announcement(TOP, ["a"])
    assert event_model_size(ann) == 3
    assert formula_size(DynBox(PointedEvent(ann, "e"), Atom("p"))) == 5


def test_union_program_size():
    ann = announcement(TOP, ["a"])
    prog = Union(PointedEvent(ann, "e"), PointedEvent(ann, "e"))
    assert program_size(prog) == 1 + 3 + 3


def test_size_strictly_monotone_on_subterms():
    gen = InstanceGen(11)
    for _ in range(200):
        atoms, agents = gen.pools()
        ems = [gen.event_model(atoms, agents)]
        phi = gen.formula(atoms, agents, ems, 20)
        stack = [phi]
        while stack:
            f = stack.pop()
            subs = []
            if isinstance(f, (Not, Box)):
                subs = [f.sub]
            elif isinstance(f, And):
                subs = [f.left, f.right]
            elif isinstance(f, DynBox):
                subs = [f.sub]
            for sub in subs:
                assert formula_size(sub) < formula_size(f)
                stack.append(sub)


def test_event_model_validation():
    with pytest.raises(ValueError):
        EventModel("E", [], {}, {})
    with pytest.raises(ValueError):
        EventModel("E", ["e"], {}, {})  # missing precondition
    with pytest.raises(ValueError):
        EventModel("E", ["e"], {"a": [("e", "f")]}, {"e": TOP})
    with pytest.raises(ValueError):
        PointedEvent(announcement(TOP, ["a"]), "nope")


def test_atom_and_agent_ids_validated():
    with pytest.raises(ValueError):
        Atom("")
    with pytest.raises(ValueError):
        Atom("two words")
    with pytest.raises(ValueError):
        Box("", Atom("p"))


def test_derived_connectives_shape():
    p, q = Atom("p"), Atom("q")
    assert lor(p, q) == Not(And(Not(p), Not(q)))
    assert impl(p, q) == Not(And(p, Not(q)))
    assert iff(p, q) == And(impl(p, q), impl(q, p))
    assert dia("a", p) == Not(Box("a", Not(p)))
    assert conj([]) == TOP
    assert disj([]) == BOT
    assert conj([p]) == p
    assert conj([p, q]) == And(p, q)


def test_collectors_reach_into_preconditions():
    inner = EventModel("IN", ["e"], {"b": [("e", "e")]}, {"e": Atom("r")})
    outer = EventModel(
        "OUT", ["f"], {"a": [("f", "f")]}, {"f": DynBox(PointedEvent(inner, "e"), Atom("q"))}
    )
    phi = DynBox(PointedEvent(outer, "f"), Box("c", Atom("p")))
    assert atoms_of(phi) == {"p", "q", "r"}
    assert agents_of(phi) == {"a", "b", "c"}
    assert set(event_models_of(phi)) == {"IN", "OUT"}
    assert has_dynamic(phi)
    assert not has_dynamic(Box("c", Atom("p")))


def test_event_models_of_rejects_name_collision():
    e1 = EventModel("E", ["e"], {}, {"e": TOP})
    e2 = EventModel("E", ["e", "f"], {}, {"e": TOP, "f": TOP})
    phi = And(
        DynBox(PointedEvent(e1, "e"), Atom("p")),
        DynBox(PointedEvent(e2, "e"), Atom("p")),
    )
    with pytest.raises(ValueError):
        event_models_of(phi)


def test_announcement_shape():
    ann = announcement(Atom("p"), ["1", "2"])
    assert is_announcement(ann)
    assert ann.agents == {"1", "2"}
    assert not is_announcement(
        EventModel("other", ["e"], {"1": [("e", "e")]}, {"e": TOP})
    )


def test_structural_equality_and_hashing():
    rng = random.Random(5)
    gen = InstanceGen(5)
    atoms, agents = gen.pools()
    ems = [gen.event_model(atoms, agents)]
    for _ in range(50):
        phi = gen.formula(atoms, agents, ems, 15)
        assert hash(phi) == hash(phi)
        assert phi == phi
    e1 = announcement(Atom("p"), ["a"])
    e2 = announcement(Atom("p"), ["a"])
    assert e1 == e2 and hash(e1) == hash(e2)
    assert e1 != announcement(Atom("p"), ["a", "b"])
