"""Reasoning toolkit for dynamic epistemic logic with event models.

The package provides:

* a formula language with event-model modalities and union programs
  (:mod:`delkit.core`, :mod:`delkit.syntax`),
* Kripke semantics with product update and a naive evaluator
  (:mod:`delkit.kripke`),
* a recursive model checker that never materializes product models
  (:mod:`delkit.mcheck`),
* satisfiability and validity via a tableau calculus with countermodel
  extraction (:mod:`delkit.tableau`),
* translation into the static epistemic language by reduction axioms
  (:mod:`delkit.reduction`),
* hardness-instance generators with brute-force oracles for quantified
  Boolean formulas and grid tilings (:mod:`delkit.qbf`, :mod:`delkit.tiling`),
* JSON model formats and a command-line frontend
  (:mod:`delkit.modelio`, :mod:`delkit.cli`).
"""

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
    announcement,
    atoms_of,
    agents_of,
    box_power,
    conj,
    dia,
    dia_power,
    disj,
    dyn_dia,
    event_model_size,
    event_models_of,
    formula_size,
    has_dynamic,
    iff,
    impl,
    lor,
    program_size,
)
from .kripke import (
    EpistemicModel,
    PointedModel,
    bounded_bisimilar,
    evaluate,
    evaluate_pointed,
    executable,
    product_update,
)
from .mcheck import ModelChecker, m_check, model_check
from .reduction import TranslationReport, translate, translation_report
from .syntax import FormulaSyntaxError, parse_formula, print_formula
from .tableau import SatResult, extract_model, is_satisfiable, is_valid

__all__ = [name for name in dir() if not name.startswith("_")]
