"""Grammar: parsing, printing, round trips, and desugaring semantics."""

import pytest

from delkit.core import (
    And,
    Atom,
    Box,
    DynBox,
    Not,
    PointedEvent,
    TOP,
    Union,
    announcement,
    dia,
    event_models_of,
    iff,
    impl,
    lor,
)
from delkit.kripke import evaluate, executable, pair_id, product_update
from delkit.syntax import FormulaSyntaxError, parse_formula, print_formula

from oracles import announcement_eval
from randgen import InstanceGen


def test_parse_basic_shapes():
    assert parse_formula("~(p & ~p)") == Not(And(Atom("p"), Not(Atom("p"))))
    assert parse_formula("top") == TOP
    assert parse_formula("B{1} ~B{2} p") == Box("1", Not(Box("2", Atom("p"))))
    assert parse_formula("(p | q)") == lor(Atom("p"), Atom("q"))
    assert parse_formula("(p -> q)") == impl(Atom("p"), Atom("q"))
    assert parse_formula("(p <-> q)") == iff(Atom("p"), Atom("q"))
    assert parse_formula("<B{a}> p") == dia("a", Atom("p"))


def test_parse_unparenthesized_chains():
    f = parse_formula("p & B{1} p & ~B{2} p")
    assert f == And(And(Atom("p"), Box("1", Atom("p"))), Not(Box("2", Atom("p"))))


def test_parse_announcement_desugars():
    f = parse_formula("[!p] B{2} p", agents=["1", "2"])
    ann = announcement(Atom("p"), ["1", "2"])
    assert f == DynBox(PointedEvent(ann, "e"), Box("2", Atom("p")))


def test_parse_programs(message_env):
    f = parse_formula("[E1#w1 u E2#w2] p", message_env)
    e1 = PointedEvent(message_env["E1"], "w1")
    e2 = PointedEvent(message_env["E2"], "w2")
    assert f == DynBox(Union(e1, e2), Atom("p"))
    # sequencing desugars into nested boxes
    assert parse_formula("[E1#w1 ; E2#w2] p", message_env) == DynBox(
        e1, DynBox(e2, Atom("p"))
    )
    # union binds looser than sequence
    f2 = parse_formula("[E1#w1 u E2#w2 ; E1#u1] p", message_env)
    seq_part = DynBox(e2, DynBox(PointedEvent(message_env["E1"], "u1"), Atom("p")))
    assert f2 == And(DynBox(e1, Atom("p")), seq_part)


def test_parse_program_diamond(message_env):
    f = parse_formula("<E1#w1> p", message_env)
    pe = PointedEvent(message_env["E1"], "w1")
    assert f == Not(DynBox(pe, Not(Atom("p"))))


def test_parse_errors_carry_positions(message_env):
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("p & (q")
    assert err.value.position >= 0
    with pytest.raises(FormulaSyntaxError, match="unknown event model"):
        parse_formula("[NOPE#e] p", message_env)
    with pytest.raises(FormulaSyntaxError, match="no event"):
        parse_formula("[E1#zz] p", message_env)
    with pytest.raises(FormulaSyntaxError, match="trailing"):
        parse_formula("p q")
    with pytest.raises(FormulaSyntaxError, match="unexpected character"):
        parse_formula("p @ q")


def test_print_examples(message_env):
    assert print_formula(Atom("p")) == "p"
    assert print_formula(Box("1", Not(Box("2", Atom("p"))))) == "B{1} ~B{2} p"
    f = parse_formula("[E1#w1][E2#w2] B{2} B{1} B{2} p", message_env)
    assert parse_formula(print_formula(f), message_env) == f


def test_round_trip_on_random_asts():
    """parse(print(f)) is structurally f, for 1000 generated formulas."""
    gen = InstanceGen(404)
    for _ in range(1000):
        atoms, agents = gen.pools()
        ems = [gen.event_model(atoms, agents) for _ in range(2)]
        phi = gen.formula(atoms, agents, ems, 25)
        env = event_models_of(phi)
        assert parse_formula(print_formula(phi), env) == phi


def test_round_trip_announcements():
    gen = InstanceGen(405)
    agents = ["a", "b"]
    for _ in range(100):
        atoms = ["p", "q"]
        body = gen.formula(atoms, agents, [], 6)
        pre = gen.formula(atoms, agents, [], 4)
        phi = DynBox(PointedEvent(announcement(pre, agents), "e"), body)
        assert print_formula(phi).startswith("[! ")
        assert parse_formula(print_formula(phi), agents=agents) == phi


def test_desugaring_preserves_semantics():
    """Each derived form evaluates like its definition on random models."""
    gen = InstanceGen(406)
    for _ in range(100):
        atoms, agents = gen.pools()
        pm = gen.model(atoms, agents)
        m, w = pm.model, pm.world
        a = gen.formula(atoms, agents, [], 5)
        b = gen.formula(atoms, agents, [], 5)
        ag = gen.rng.choice(agents)
        assert evaluate(m, w, lor(a, b)) == (evaluate(m, w, a) or evaluate(m, w, b))
        assert evaluate(m, w, impl(a, b)) == ((not evaluate(m, w, a)) or evaluate(m, w, b))
        assert evaluate(m, w, iff(a, b)) == (evaluate(m, w, a) == evaluate(m, w, b))
        assert evaluate(m, w, dia(ag, a)) == (not evaluate(m, w, Box(ag, Not(a))))


def test_sequence_and_diamond_desugaring_semantics(message_env):
    gen = InstanceGen(407)
    e1 = PointedEvent(message_env["E1"], "w1")
    for _ in range(60):
        pm = gen.model(["p", "q"], ["1", "2"])
        m, w = pm.model, pm.world
        body = gen.formula(["p", "q"], ["1", "2"], [], 5)
        # <E#e> f  ==  executable and f after the update
        dyn_dia_truth = evaluate(m, w, Not(DynBox(e1, Not(body))))
        direct = False
        if executable(pm, e1):
            updated = product_update(m, message_env["E1"])
            direct = evaluate(updated, pair_id(w, "w1"), body)
        assert dyn_dia_truth == direct


def test_announcement_matches_submodel_restriction():
    gen = InstanceGen(408)
    for _ in range(100):
        atoms, agents = gen.pools()
        pm = gen.model(atoms, agents)
        pre = gen.formula(atoms, agents, [], 4)
        body = gen.formula(atoms, agents, [], 6)
        phi = DynBox(PointedEvent(announcement(pre, pm.model.agents), "e"), body)
        assert evaluate(pm.model, pm.world, phi) == announcement_eval(
            pm.model, pm.world, pre, body
        )
