"""Translation of dynamic formulas into the static epistemic language.

``translate`` rewrites every dynamic box away using the standard equivalences

    [E,e] p        ==  pre(e) -> p
    [E,e] top      ==  top
    [E,e] bot      ==  pre(e) -> bot
    [E,e] ~f       ==  pre(e) -> ~[E,e] f
    [E,e] (f & g)  ==  [E,e] f & [E,e] g
    [E,e] B_a f    ==  pre(e) -> /\ { B_a [E,e'] f : e' an a-successor of e }
    [p u q] f      ==  [p] f & [q] f

working innermost-first, so preconditions that themselves contain dynamic
boxes are translated before they are copied into the output.  The empty
conjunction in the belief case is ``top``.  No simplification is performed:
the output mirrors the axioms literally, which makes it auditable but
exponentially larger than the input in the worst case.
"""

from __future__ import annotations

from dataclasses import dataclass

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
    TOP,
    Top,
    Union,
    conj,
    formula_size,
    has_dynamic,
    impl,
)

__all__ = ["translate", "TranslationReport", "translation_report"]


def translate(phi: Formula) -> Formula:
    """Equivalent formula without dynamic modalities."""
    if isinstance(phi, (Atom, Top, Bot)):
        return phi
    if isinstance(phi, Not):
        return Not(translate(phi.sub))
    if isinstance(phi, And):
        return And(translate(phi.left), translate(phi.right))
    if isinstance(phi, Box):
        return Box(phi.agent, translate(phi.sub))
    if isinstance(phi, DynBox):
        prog = phi.prog
        if isinstance(prog, Union):
            return And(
                translate(DynBox(prog.left, phi.sub)),
                translate(DynBox(prog.right, phi.sub)),
            )
        if isinstance(prog, PointedEvent):
            return _push(prog.model, prog.event, translate(phi.sub))
    raise TypeError(f"not a formula: {phi!r}")


def _push(model: EventModel, event: str, body: Formula) -> Formula:
    """Apply the axioms to ``[model,event] body`` for a dynamics-free body."""
    pre = translate(model.pre[event])
    if isinstance(body, Atom):
        return impl(pre, body)
    if isinstance(body, Top):
        return TOP
    if isinstance(body, Bot):
        return impl(pre, body)
    if isinstance(body, Not):
        return impl(pre, Not(_push(model, event, body.sub)))
    if isinstance(body, And):
        return And(_push(model, event, body.left), _push(model, event, body.right))
    if isinstance(body, Box):
        boxes = [
            Box(body.agent, _push(model, e, body.sub))
            for e in model.successors(event, body.agent)
        ]
        return impl(pre, conj(boxes))
    raise TypeError(f"dynamic modality survived translation: {body!r}")


@dataclass(frozen=True)
class TranslationReport:
    input: Formula
    output: Formula
    input_size: int
    output_size: int


def translation_report(phi: Formula) -> TranslationReport:
    out = translate(phi)
    assert not has_dynamic(out)
    return TranslationReport(phi, out, formula_size(phi), formula_size(out))
