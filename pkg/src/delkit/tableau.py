"""Tableau calculus for satisfiability, validity, and countermodel extraction.

A branch is a growing set of tableau terms:

* ``Holds(label, seq, formula)``  — after executing the event sequence
  ``seq`` at the world named ``label``, ``formula`` is true (and the
  sequence is executable there);
* ``Exec(label, seq)`` / ``NotExec(label, seq)`` — the sequence is / is not
  executable at the world;
* ``Edge(label, agent, target)`` — an accessibility fact of the underlying
  model being built;
* ``Clash`` — the branch is contradictory.

Rules decompose terms until a branch either contains ``Clash`` (closed) or
admits no further rule application (saturated).  A saturated open branch
yields a pointed epistemic model that satisfies the root formula: worlds are
the labels, relations come from edge terms, and an atom is true at a label
exactly when the branch asserts it at the empty sequence.

The search is a depth-first backtracking over the branching rules.  Rule
selection order: contradiction rules first, then non-branching linear rules,
then branching rules that create no labels, then the belief-box rule, and
label-creating negated boxes last.  A rule instance is skipped whenever one
of its denominators is already fully contained in the branch, which both
avoids redundant work and makes saturation detection sound.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

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
    event_model_size,
    formula_size,
)
from .kripke import EpistemicModel, PointedModel, evaluate
from .syntax import print_formula

__all__ = [
    "Holds",
    "Exec",
    "NotExec",
    "Edge",
    "Clash",
    "CLASH",
    "Branch",
    "RuleInstance",
    "applicable_rules",
    "expand",
    "extract_model",
    "SatResult",
    "TableauStats",
    "Tableau",
    "is_satisfiable",
    "is_valid",
    "BudgetExceeded",
    "TermMeasureError",
]

EventSeq = tuple[PointedEvent, ...]


class Term:
    """Base class for tableau terms."""

    __slots__ = ()


@dataclass(frozen=True)
class Holds(Term):
    label: str
    seq: EventSeq
    formula: Formula


@dataclass(frozen=True)
class Exec(Term):
    label: str
    seq: EventSeq


@dataclass(frozen=True)
class NotExec(Term):
    label: str
    seq: EventSeq


@dataclass(frozen=True)
class Edge(Term):
    label: str
    agent: str
    target: str


@dataclass(frozen=True)
class Clash(Term):
    pass


CLASH = Clash()


def _render_seq(seq: EventSeq) -> str:
    return ";".join(f"{pe.model.name}#{pe.event}" for pe in seq)


def render_term(term: Term) -> str:
    if isinstance(term, Holds):
        return f"({term.label} [{_render_seq(term.seq)}] {print_formula(term.formula)})"
    if isinstance(term, Exec):
        return f"({term.label} [{_render_seq(term.seq)}] ok)"
    if isinstance(term, NotExec):
        return f"({term.label} [{_render_seq(term.seq)}] fail)"
    if isinstance(term, Edge):
        return f"({term.label} R_{term.agent} {term.target})"
    if isinstance(term, Clash):
        return "(clash)"
    raise TypeError(f"not a term: {term!r}")


class Branch:
    """Insertion-ordered set of terms; terms are only ever added."""

    __slots__ = ("terms", "depth")

    def __init__(self, terms: Iterable[Term] = (), depth: int = 0) -> None:
        self.terms: dict[Term, None] = dict.fromkeys(terms)
        self.depth = depth

    def __contains__(self, term: Term) -> bool:
        return term in self.terms

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def add(self, term: Term) -> bool:
        if term in self.terms:
            return False
        self.terms[term] = None
        return True

    def copy(self) -> "Branch":
        child = Branch((), self.depth)
        child.terms = dict(self.terms)
        return child

    @property
    def closed(self) -> bool:
        return CLASH in self.terms

    def labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for term in self.terms:
            if isinstance(term, (Holds, Exec, NotExec)):
                seen.setdefault(term.label)
            elif isinstance(term, Edge):
                seen.setdefault(term.label)
                seen.setdefault(term.target)
        return list(seen)


@dataclass(frozen=True)
class RuleInstance:
    """A rule with the numerator terms (and choice data) it fires on."""

    rule: str
    terms: tuple[Term, ...]
    data: tuple = ()

    @property
    def principal(self) -> Term:
        return self.terms[0]


def _is_literal(phi: Formula) -> bool:
    return isinstance(phi, Atom) or (isinstance(phi, Not) and isinstance(phi.sub, Atom))


def _successor_tuples(seq: EventSeq, agent: str) -> list[EventSeq]:
    """Pointwise event-successor tuples of ``seq`` for ``agent``, sorted."""
    options: list[list[PointedEvent]] = []
    for pe in seq:
        succ = pe.model.successors(pe.event, agent)
        if not succ:
            return []
        options.append([PointedEvent(pe.model, e) for e in succ])
    return [tuple(choice) for choice in itertools.product(*options)]


class _Index:
    """One pass over a branch, grouped by term kind."""

    def __init__(self, branch: Branch) -> None:
        self.holds: list[Holds] = []
        self.execs: list[Exec] = []
        self.notexecs: list[NotExec] = []
        self.edges_by_source: dict[tuple[str, str], list[Edge]] = {}
        self.pos_atoms: dict[tuple[str, EventSeq], dict[str, Holds]] = {}
        self.neg_atoms: dict[tuple[str, EventSeq], dict[str, Holds]] = {}
        self.exec_keys: set[tuple[str, EventSeq]] = set()
        self.notexec_keys: set[tuple[str, EventSeq]] = set()
        for term in branch:
            if isinstance(term, Holds):
                self.holds.append(term)
                f = term.formula
                if isinstance(f, Atom):
                    self.pos_atoms.setdefault((term.label, term.seq), {})[f.name] = term
                elif isinstance(f, Not) and isinstance(f.sub, Atom):
                    self.neg_atoms.setdefault((term.label, term.seq), {})[f.sub.name] = term
            elif isinstance(term, Exec):
                self.execs.append(term)
                self.exec_keys.add((term.label, term.seq))
            elif isinstance(term, NotExec):
                self.notexecs.append(term)
                self.notexec_keys.add((term.label, term.seq))
            elif isinstance(term, Edge):
                self.edges_by_source.setdefault((term.label, term.agent), []).append(term)


def _iter_applicable(branch: Branch) -> Iterator[RuleInstance]:
    """Applicable rule instances in priority order; none for closed branches."""
    if branch.closed:
        return
    idx = _Index(branch)

    # -- contradictions ------------------------------------------------------
    for t in idx.holds:
        if isinstance(t.formula, Bot):
            yield RuleInstance("bot", (t,))
        elif isinstance(t.formula, Not) and isinstance(t.formula.sub, Top):
            yield RuleInstance("not-top", (t,))
    for key, pos in idx.pos_atoms.items():
        neg = idx.neg_atoms.get(key)
        if neg:
            for name, tp in pos.items():
                tn = neg.get(name)
                if tn is not None:
                    yield RuleInstance("clash-literal", (tp, tn))
    for t in idx.execs:
        if (t.label, t.seq) in idx.notexec_keys:
            yield RuleInstance("clash-exec", (t, NotExec(t.label, t.seq)))
    for t in idx.notexecs:
        if not t.seq:
            yield RuleInstance("clash-empty", (t,))

    # -- linear, non-branching ----------------------------------------------
    for t in idx.holds:
        f = t.formula
        if isinstance(f, And):
            if (
                Holds(t.label, t.seq, f.left) not in branch
                or Holds(t.label, t.seq, f.right) not in branch
            ):
                yield RuleInstance("and", (t,))
        elif isinstance(f, Not) and isinstance(f.sub, Not):
            if Holds(t.label, t.seq, f.sub.sub) not in branch:
                yield RuleInstance("not-not", (t,))
        elif isinstance(f, Atom) and t.seq:
            if Holds(t.label, (), f) not in branch:
                yield RuleInstance("base-p", (t,))
        elif isinstance(f, Not) and isinstance(f.sub, Atom) and t.seq:
            if Holds(t.label, (), f) not in branch:
                yield RuleInstance("base-not-p", (t,))
        elif isinstance(f, Not) and isinstance(f.sub, DynBox):
            inner = f.sub
            if isinstance(inner.prog, PointedEvent):
                ext = t.seq + (inner.prog,)
                if (
                    Exec(t.label, ext) not in branch
                    or Holds(t.label, ext, Not(inner.sub)) not in branch
                ):
                    yield RuleInstance("not-dyn", (t,))
        elif isinstance(f, DynBox) and isinstance(f.prog, Union):
            if (
                Holds(t.label, t.seq, DynBox(f.prog.left, f.sub)) not in branch
                or Holds(t.label, t.seq, DynBox(f.prog.right, f.sub)) not in branch
            ):
                yield RuleInstance("union", (t,))
    for t in idx.execs:
        if t.seq:
            last = t.seq[-1]
            rest = t.seq[:-1]
            if (
                Holds(t.label, rest, last.pre) not in branch
                or Exec(t.label, rest) not in branch
            ):
                yield RuleInstance("exec-unfold", (t,))

    # -- branching, no new labels --------------------------------------------
    for t in idx.holds:
        f = t.formula
        if isinstance(f, Not) and isinstance(f.sub, And):
            left = Holds(t.label, t.seq, Not(f.sub.left))
            right = Holds(t.label, t.seq, Not(f.sub.right))
            if left not in branch and right not in branch:
                yield RuleInstance("not-and", (t,))
        elif isinstance(f, DynBox) and isinstance(f.prog, PointedEvent):
            ext = t.seq + (f.prog,)
            d_skip = NotExec(t.label, ext) in branch
            d_take = Exec(t.label, ext) in branch and Holds(t.label, ext, f.sub) in branch
            if not d_skip and not d_take:
                yield RuleInstance("dyn", (t,))
        elif isinstance(f, Not) and isinstance(f.sub, DynBox) and isinstance(f.sub.prog, Union):
            inner = f.sub
            left = Holds(t.label, t.seq, Not(DynBox(inner.prog.left, inner.sub)))
            right = Holds(t.label, t.seq, Not(DynBox(inner.prog.right, inner.sub)))
            if left not in branch and right not in branch:
                yield RuleInstance("not-union", (t,))
    for t in idx.notexecs:
        if t.seq:
            last = t.seq[-1]
            rest = t.seq[:-1]
            d_fail_here = (
                Exec(t.label, rest) in branch
                and Holds(t.label, rest, Not(last.pre)) in branch
            )
            d_fail_earlier = NotExec(t.label, rest) in branch
            if not d_fail_here and not d_fail_earlier:
                yield RuleInstance("not-exec-unfold", (t,))

    # -- belief boxes ----------------------------------------------------------
    for t in idx.holds:
        f = t.formula
        if not (isinstance(f, Box)):
            continue
        for edge in idx.edges_by_source.get((t.label, f.agent), ()):
            for tup in _successor_tuples(t.seq, f.agent):
                d_skip = NotExec(edge.target, tup) in branch
                d_take = (
                    Exec(edge.target, tup) in branch
                    and Holds(edge.target, tup, f.sub) in branch
                )
                if not d_skip and not d_take:
                    yield RuleInstance("box", (t, edge), (tup,))

    # -- negated boxes (create labels) ----------------------------------------
    for t in idx.holds:
        f = t.formula
        if not (isinstance(f, Not) and isinstance(f.sub, Box)):
            continue
        agent, sub = f.sub.agent, f.sub.sub
        tuples = _successor_tuples(t.seq, agent)
        witnessed = False
        for edge in idx.edges_by_source.get((t.label, agent), ()):
            for tup in tuples:
                if (
                    Exec(edge.target, tup) in branch
                    and Holds(edge.target, tup, Not(sub)) in branch
                ):
                    witnessed = True
                    break
            if witnessed:
                break
        if not witnessed:
            yield RuleInstance("not-box", (t,), (tuple(tuples),))


def applicable_rules(branch: Branch) -> list[RuleInstance]:
    return list(_iter_applicable(branch))


def expand(branch: Branch, instance: RuleInstance) -> list[Branch]:
    """Extensions of ``branch`` by each denominator of ``instance``.

    Standalone variant for inspecting single rule applications: fresh labels
    restart after the largest ``s<n>`` label on the branch.  A full search
    should go through :class:`Tableau`, whose label counter is global to the
    run.
    """
    top = 0
    for label in branch.labels():
        if label.startswith("s") and label[1:].isdigit():
            top = max(top, int(label[1:]))
    counter = itertools.count(top + 1)

    def fresh() -> str:
        return f"s{next(counter)}"

    out = []
    for denom in _denominators(instance, fresh):
        child = branch.copy()
        for term in denom:
            child.add(term)
        out.append(child)
    return out


def _denominators(
    instance: RuleInstance, fresh: Callable[[], str]
) -> list[tuple[Term, ...]]:
    """Term sets added by each denominator of the instance."""
    rule = instance.rule
    if rule in ("bot", "not-top", "clash-literal", "clash-exec", "clash-empty"):
        return [(CLASH,)]
    t = instance.terms[0]
    if rule == "and":
        assert isinstance(t, Holds) and isinstance(t.formula, And)
        return [
            (
                Holds(t.label, t.seq, t.formula.left),
                Holds(t.label, t.seq, t.formula.right),
            )
        ]
    if rule == "not-not":
        assert isinstance(t, Holds)
        return [(Holds(t.label, t.seq, t.formula.sub.sub),)]
    if rule in ("base-p", "base-not-p"):
        assert isinstance(t, Holds)
        return [(Holds(t.label, (), t.formula),)]
    if rule == "not-dyn":
        assert isinstance(t, Holds)
        inner = t.formula.sub
        ext = t.seq + (inner.prog,)
        return [(Exec(t.label, ext), Holds(t.label, ext, Not(inner.sub)))]
    if rule == "union":
        assert isinstance(t, Holds)
        f = t.formula
        return [
            (
                Holds(t.label, t.seq, DynBox(f.prog.left, f.sub)),
                Holds(t.label, t.seq, DynBox(f.prog.right, f.sub)),
            )
        ]
    if rule == "exec-unfold":
        assert isinstance(t, Exec)
        last, rest = t.seq[-1], t.seq[:-1]
        return [(Holds(t.label, rest, last.pre), Exec(t.label, rest))]
    if rule == "not-and":
        assert isinstance(t, Holds)
        f = t.formula.sub
        return [
            (Holds(t.label, t.seq, Not(f.left)),),
            (Holds(t.label, t.seq, Not(f.right)),),
        ]
    if rule == "dyn":
        assert isinstance(t, Holds)
        f = t.formula
        ext = t.seq + (f.prog,)
        return [
            (NotExec(t.label, ext),),
            (Exec(t.label, ext), Holds(t.label, ext, f.sub)),
        ]
    if rule == "not-union":
        assert isinstance(t, Holds)
        inner = t.formula.sub
        return [
            (Holds(t.label, t.seq, Not(DynBox(inner.prog.left, inner.sub))),),
            (Holds(t.label, t.seq, Not(DynBox(inner.prog.right, inner.sub))),),
        ]
    if rule == "not-exec-unfold":
        assert isinstance(t, NotExec)
        last, rest = t.seq[-1], t.seq[:-1]
        return [
            (Exec(t.label, rest), Holds(t.label, rest, Not(last.pre))),
            (NotExec(t.label, rest),),
        ]
    if rule == "box":
        box_term, edge = instance.terms
        assert isinstance(box_term, Holds) and isinstance(edge, Edge)
        (tup,) = instance.data
        return [
            (NotExec(edge.target, tup),),
            (Exec(edge.target, tup), Holds(edge.target, tup, box_term.formula.sub)),
        ]
    if rule == "not-box":
        assert isinstance(t, Holds)
        f = t.formula.sub
        (tuples,) = instance.data
        if not tuples:
            # No successor tuple exists: the box is vacuously true, so its
            # negation closes the branch.
            return [(CLASH,)]
        denoms = []
        for tup in tuples:
            new = fresh()
            denoms.append(
                (
                    Edge(t.label, f.agent, new),
                    Exec(new, tup),
                    Holds(new, tup, Not(f.sub)),
                )
            )
        return denoms
    raise ValueError(f"unknown rule {rule!r}")


class TermMeasureError(AssertionError):
    """Debug check: a rule added a term not smaller than its principal term."""


def _term_measure(term: Term) -> tuple[int, int]:
    """Lexicographic termination measure: (weight, formula share).

    The weight of a formula term is ``1 + sum(|E|+1 over the sequence) +
    |formula|``; dynamic-box rules keep it constant while shifting size from
    the formula to the sequence, so the formula share breaks the tie.
    """
    if isinstance(term, Holds):
        w = 1 + sum(event_model_size(pe.model) + 1 for pe in term.seq)
        fs = formula_size(term.formula)
        return (w + fs, fs)
    if isinstance(term, (Exec, NotExec)):
        w = 1 + sum(event_model_size(pe.model) + 1 for pe in term.seq)
        return (w + 1, 1)
    return (1, 1)


def extract_model(branch: Branch, root_label: str = "s0") -> PointedModel:
    """Read a pointed epistemic model off a saturated open branch."""
    if branch.closed:
        raise ValueError("cannot extract a model from a closed branch")
    labels = branch.labels()
    if root_label not in labels:
        labels.insert(0, root_label)
    rel: dict[str, set[tuple[str, str]]] = {}
    val: dict[str, set[str]] = {}
    for term in branch:
        if isinstance(term, Edge):
            rel.setdefault(term.agent, set()).add((term.label, term.target))
        elif isinstance(term, Holds) and not term.seq and isinstance(term.formula, Atom):
            val.setdefault(term.formula.name, set()).add(term.label)
    model = EpistemicModel(labels, rel, val)
    return PointedModel(model, root_label)


@dataclass
class TableauStats:
    rule_applications: int = 0
    branches_explored: int = 0
    peak_depth: int = 0
    labels_created: int = 0


@dataclass
class SatResult:
    satisfiable: bool
    model: Optional[PointedModel]
    branch: Optional[Branch]
    stats: TableauStats = field(default_factory=TableauStats)


class BudgetExceeded(RuntimeError):
    """The step or wall-clock budget ran out before a verdict was reached."""


class Tableau:
    """One satisfiability run; owns the fresh-label counter and budgets."""

    def __init__(
        self,
        *,
        max_steps: int = 1_000_000,
        max_seconds: float = 60.0,
        debug: bool = False,
        dump: Optional[Callable[[str], None]] = None,
    ) -> None:
        self.max_steps = max_steps
        self.max_seconds = max_seconds
        self.debug = debug
        self.dump = dump
        self.stats = TableauStats()
        self._label_counter = 0
        self._branch_counter = 0

    def _fresh_label(self) -> str:
        self._label_counter += 1
        self.stats.labels_created += 1
        return f"s{self._label_counter}"

    def expand(self, branch: Branch, instance: RuleInstance) -> list[Branch]:
        """Extensions of ``branch`` by each denominator; the input is untouched."""
        return self._apply(branch.copy(), instance)

    def _apply(self, branch: Branch, instance: RuleInstance) -> list[Branch]:
        """Like :meth:`expand` but extends ``branch`` itself for the first choice."""
        denoms = _denominators(instance, self._fresh_label)
        self.stats.rule_applications += 1
        if self.dump is not None:
            numer = " ".join(render_term(t) for t in instance.terms)
            self.dump(f"branch={self._branch_counter:04d} rule={instance.rule} on {numer}")
        if self.debug:
            bound = _term_measure(instance.principal)
            for denom in denoms:
                for term in denom:
                    if term in branch:
                        continue
                    if not _term_measure(term) < bound:
                        raise TermMeasureError(
                            f"rule {instance.rule} grew the term measure: "
                            f"{render_term(term)} vs {render_term(instance.principal)}"
                        )
        split = len(denoms) > 1
        base_depth = branch.depth
        children = [branch] + [branch.copy() for _ in denoms[1:]]
        self._branch_counter += len(denoms) - 1
        for child, denom in zip(children, denoms):
            child.depth = base_depth + (1 if split else 0)
            for term in denom:
                child.add(term)
        return children

    def search(self, root: Formula) -> SatResult:
        deadline = time.monotonic() + self.max_seconds
        start = Branch([Holds("s0", (), root)])
        stack = [start]
        while stack:
            branch = stack.pop()
            self.stats.branches_explored += 1
            while True:
                if branch.closed:
                    break
                instance = next(_iter_applicable(branch), None)
                if instance is None:
                    self.stats.peak_depth = max(self.stats.peak_depth, branch.depth)
                    return SatResult(True, None, branch, self.stats)
                if self.stats.rule_applications >= self.max_steps:
                    raise BudgetExceeded(f"step budget {self.max_steps} exhausted")
                if time.monotonic() > deadline:
                    raise BudgetExceeded(f"time budget {self.max_seconds}s exhausted")
                children = self._apply(branch, instance)
                self.stats.peak_depth = max(self.stats.peak_depth, children[0].depth)
                branch = children[0]
                if len(children) > 1:
                    # leftmost denominator continues in place; siblings queue
                    # up for depth-first backtracking
                    stack.extend(reversed(children[1:]))
        return SatResult(False, None, None, self.stats)


def is_satisfiable(
    phi: Formula,
    *,
    max_steps: int = 1_000_000,
    max_seconds: float = 60.0,
    debug: bool = False,
    dump: Optional[Callable[[str], None]] = None,
    verify: bool = True,
) -> SatResult:
    """Decide satisfiability; a SAT result carries a verified witness model."""
    run = Tableau(max_steps=max_steps, max_seconds=max_seconds, debug=debug, dump=dump)
    result = run.search(phi)
    if result.satisfiable:
        assert result.branch is not None
        result.model = extract_model(result.branch)
        if verify and not evaluate(result.model.model, result.model.world, phi):
            raise RuntimeError(
                "internal error: extracted model does not satisfy the formula"
            )
    return result


def is_valid(
    phi: Formula,
    *,
    max_steps: int = 1_000_000,
    max_seconds: float = 60.0,
    debug: bool = False,
    dump: Optional[Callable[[str], None]] = None,
) -> bool:
    """True when the negation is unsatisfiable."""
    result = is_satisfiable(
        Not(phi),
        max_steps=max_steps,
        max_seconds=max_seconds,
        debug=debug,
        dump=dump,
        verify=False,
    )
    return not result.satisfiable
