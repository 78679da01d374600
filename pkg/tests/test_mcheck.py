"""The recursive checker: worked examples, the differential property, and
its instrumentation contracts."""

import pytest

from delkit.core import Atom, DynBox, Not, PointedEvent
from delkit.kripke import EpistemicModel, PointedModel, evaluate, product_worlds_built
from delkit.mcheck import (
    DepthLimitExceeded,
    HistoryNotExecutable,
    ModelChecker,
    m_check,
    model_check,
)
from delkit.syntax import parse_formula

from randgen import InstanceGen


def test_static_examples(wellington):
    m = wellington.model
    assert m_check(m, "w", (), parse_formula("B{1} ~B{2} p"))
    assert model_check(wellington, parse_formula("p"))
    assert not model_check(PointedModel(m, "u"), parse_formula("p"))


def test_history_examples(wellington, message_env):
    m = wellington.model
    h1 = (PointedEvent(message_env["E1"], "w1"),)
    assert m_check(m, "w", h1, parse_formula("p & B{2} p & ~B{1} B{2} p"), debug=True)
    h2 = h1 + (PointedEvent(message_env["E2"], "w2"),)
    assert m_check(
        m, "w", h2, parse_formula("p & B{2} p & B{1} B{2} p & ~B{2} B{1} B{2} p"), debug=True
    )
    assert not m_check(
        m, "w", (), parse_formula("[E1#w1][E2#w2] B{2} B{1} B{2} p", message_env)
    )


def test_differential_against_naive_eval():
    gen = InstanceGen(900)
    for _ in range(150):
        pointed, phi = gen.mc_instance()
        assert model_check(pointed, phi, debug=True) == evaluate(
            pointed.model, pointed.world, phi
        )


def test_never_materializes_products():
    gen = InstanceGen(901)
    before = product_worlds_built()
    for _ in range(60):
        pointed, phi = gen.mc_instance()
        model_check(pointed, phi)
    assert product_worlds_built() == before


def test_history_extension_coherence():
    """[E#e] f at history h agrees with its unfolding over the extended history."""
    gen = InstanceGen(902)
    for _ in range(60):
        atoms, agents = gen.pools()
        pm = gen.model(atoms, agents)
        em = gen.event_model(atoms, agents)
        event = gen.rng.choice(em.events)
        pe = PointedEvent(em, event)
        body = gen.formula(atoms, agents, [], 6)
        checker = ModelChecker(pm.model)
        left = checker.check(pm.world, (), DynBox(pe, body))
        pre_holds = checker.check(pm.world, (), em.pre[event])
        right = checker.check(pm.world, (pe,), body) if pre_holds else True
        assert left == right


def test_debug_validates_history(wellington, receive_message):
    bad = (PointedEvent(receive_message, "w1"),)  # requires p, false at u
    with pytest.raises(HistoryNotExecutable):
        m_check(wellington.model, "u", bad, Atom("p"), debug=True)
    # release mode trusts the precondition
    m_check(wellington.model, "u", bad, Atom("p"))


def test_depth_limit_is_an_error_not_a_crash():
    deep = Atom("p")
    for _ in range(2000):
        deep = Not(deep)
    model = EpistemicModel(["w"], {}, {"p": ["w"]})
    with pytest.raises(DepthLimitExceeded):
        m_check(model, "w", (), deep, depth_limit=100)
    assert m_check(model, "w", (), deep)


def test_trace_hook_covers_every_call(wellington, message_env):
    rows = []
    phi = parse_formula("[E1#w1] B{2} p", message_env)
    model_check(wellington, phi, trace=lambda d, m, tag: rows.append((d, m, tag)))
    assert rows[0][0] == 0 and rows[0][2] == "dyn-box"
    assert all(isinstance(m, int) for _, m, _ in rows)
    checker = ModelChecker(wellington.model)
    checker.check(wellington.world, (), phi)
    assert len(rows) == checker.stats.calls


def test_stats_counts(wellington):
    checker = ModelChecker(wellington.model)
    assert checker.check("w", (), parse_formula("B{1} ~B{2} p"))
    assert checker.stats.calls > 0
    assert checker.stats.peak_depth >= 2
