"""Recursive model checking of dynamic formulas without product construction.

``m_check(model, world, history, phi)`` decides whether ``phi`` holds at the
world of the iterated product ``model (x) E_1 (x) ... (x) E_i`` named by
``world`` and the event history, while only ever looking at the base model
and the event models themselves.  The belief case walks candidate successor
tuples and re-checks preconditions recursively instead of building the
product, which keeps space polynomial.

The call precondition is that the history is executable at ``world`` (the
named tuple is a world of the iterated product).  Debug mode validates it on
entry and additionally asserts that the input measure ``|model| + sum of
event-model sizes + |phi|`` strictly decreases along every recursive call;
release mode trusts the precondition.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass
from typing import Callable, Optional

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
from .kripke import EpistemicModel, PointedModel, model_size

__all__ = [
    "History",
    "MCheckStats",
    "ModelChecker",
    "m_check",
    "model_check",
    "DepthLimitExceeded",
    "MeasureDescentError",
    "HistoryNotExecutable",
]

History = tuple[PointedEvent, ...]

TraceFn = Callable[[int, int, str], None]

DEFAULT_DEPTH_LIMIT = 100_000

# Python frames that are safe on the default C stack; beyond this the check
# runs on a worker thread with a larger stack.
_INLINE_FRAME_BUDGET = 6_000


class DepthLimitExceeded(RuntimeError):
    """Recursion exceeded the configured frame budget."""


class MeasureDescentError(AssertionError):
    """Debug check: a recursive call failed to shrink the input measure."""


class HistoryNotExecutable(AssertionError):
    """Debug check: a call was made with a non-executable event history."""


@dataclass
class MCheckStats:
    calls: int = 0
    peak_depth: int = 0


class ModelChecker:
    """Reusable checker bound to one epistemic model."""

    def __init__(
        self,
        model: EpistemicModel,
        *,
        debug: bool = False,
        trace: Optional[TraceFn] = None,
        depth_limit: int = DEFAULT_DEPTH_LIMIT,
    ) -> None:
        self.model = model
        self.debug = debug
        self.trace = trace
        self.depth_limit = depth_limit
        self.stats = MCheckStats()
        self._model_size = model_size(model)
        self._em_sizes: dict[EventModel, int] = {}
        # Keyed by id with the formula kept alive, so ids cannot be recycled.
        self._f_sizes: dict[int, tuple[Formula, int]] = {}

    # -- measures ----------------------------------------------------------

    def _event_size(self, model: EventModel) -> int:
        size = self._em_sizes.get(model)
        if size is None:
            size = event_model_size(model)
            self._em_sizes[model] = size
        return size

    def _formula_size(self, phi: Formula) -> int:
        entry = self._f_sizes.get(id(phi))
        if entry is None:
            entry = (phi, formula_size(phi))
            self._f_sizes[id(phi)] = entry
        return entry[1]

    def measure(self, history: History, phi: Formula) -> int:
        return (
            self._model_size
            + sum(self._event_size(pe.model) for pe in history)
            + self._formula_size(phi)
        )

    # -- public entry points -----------------------------------------------

    def check(self, world: str, history: History, phi: Formula) -> bool:
        if world not in self.model.worlds:
            raise ValueError(f"{world!r} is not a world of the model")
        if self.debug:
            self._require_executable(world, history)
        # The measure strictly decreases along recursive calls, so it bounds
        # the recursion depth.  Shallow runs stay on the native stack; deep
        # ones move to a worker thread with an enlarged stack, since CPython
        # exhausts the C stack long before a 100k-frame limit.
        bound = min(self.depth_limit, self.measure(history, phi)) + 2
        frames = 6 * bound + 1000
        if frames <= _INLINE_FRAME_BUDGET:
            return self._run_inline(world, history, phi, frames)
        return self._run_in_thread(world, history, phi, frames)

    def _run_inline(self, world: str, history: History, phi: Formula, frames: int) -> bool:
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, frames))
        try:
            return self._check(world, history, phi, 0, None)
        finally:
            sys.setrecursionlimit(old_limit)

    def _run_in_thread(self, world: str, history: History, phi: Formula, frames: int) -> bool:
        result: list[bool] = []
        error: list[BaseException] = []

        def worker() -> None:
            old_limit = sys.getrecursionlimit()
            sys.setrecursionlimit(frames + 100)
            try:
                result.append(self._check(world, history, phi, 0, None))
            except BaseException as exc:  # re-raised on the calling thread
                error.append(exc)
            finally:
                sys.setrecursionlimit(old_limit)

        stack_bytes = min(max(64 * 1024 * 1024, frames * 2048), 1 << 30)
        old_stack = threading.stack_size(stack_bytes)
        try:
            thread = threading.Thread(target=worker, name="mcheck-deep")
            thread.start()
        finally:
            threading.stack_size(old_stack)
        thread.join()
        if error:
            raise error[0]
        return result[0]

    def _require_executable(self, world: str, history: History) -> None:
        plain = ModelChecker(self.model, depth_limit=self.depth_limit)
        for j, pe in enumerate(history):
            if not plain.check(world, history[:j], pe.pre):
                raise HistoryNotExecutable(
                    f"history prefix of length {j + 1} not executable at {world!r}"
                )

    # -- recursion ---------------------------------------------------------

    def _check(
        self,
        world: str,
        history: History,
        phi: Formula,
        depth: int,
        parent_measure: Optional[int],
    ) -> bool:
        self.stats.calls += 1
        if depth > self.stats.peak_depth:
            self.stats.peak_depth = depth
        if depth > self.depth_limit:
            raise DepthLimitExceeded(f"recursion deeper than {self.depth_limit}")

        measure: Optional[int] = None
        if self.debug or self.trace is not None:
            measure = self.measure(history, phi)
            if self.debug and parent_measure is not None and measure >= parent_measure:
                raise MeasureDescentError(
                    f"measure did not decrease: {parent_measure} -> {measure}"
                )
            if self.trace is not None:
                self.trace(depth, measure, _case_tag(phi))

        if isinstance(phi, Atom):
            return self.model.truth(world, phi.name)
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bot):
            return False
        if isinstance(phi, Not):
            return not self._check(world, history, phi.sub, depth + 1, measure)
        if isinstance(phi, And):
            return self._check(world, history, phi.left, depth + 1, measure) and self._check(
                world, history, phi.right, depth + 1, measure
            )
        if isinstance(phi, Box):
            for u in self.model.successors(world, phi.agent):
                if not self._box_tuples(u, history, phi.agent, phi.sub, 0, [], depth, measure):
                    return False
            return True
        if isinstance(phi, DynBox):
            prog = phi.prog
            if isinstance(prog, Union):
                return self._check(
                    world, history, DynBox(prog.left, phi.sub), depth + 1, measure
                ) and self._check(
                    world, history, DynBox(prog.right, phi.sub), depth + 1, measure
                )
            if isinstance(prog, PointedEvent):
                if self._check(world, history, prog.pre, depth + 1, measure):
                    return self._check(world, history + (prog,), phi.sub, depth + 1, measure)
                return True
        raise TypeError(f"not a formula: {phi!r}")

    def _box_tuples(
        self,
        u: str,
        history: History,
        agent: str,
        sub: Formula,
        j: int,
        chosen: list[PointedEvent],
        depth: int,
        parent_measure: Optional[int],
    ) -> bool:
        """Walk executable successor event tuples; ``sub`` must hold at each.

        ``chosen`` holds the successor events picked for history positions
        ``< j``.  Tuples are visited in lexicographic order and failing ones
        short-circuit.
        """
        if j == len(history):
            return self._check(u, tuple(chosen), sub, depth + 1, parent_measure)
        step = history[j]
        prefix = tuple(chosen)
        for e in step.model.successors(step.event, agent):
            if self._check(u, prefix, step.model.pre[e], depth + 1, parent_measure):
                chosen.append(PointedEvent(step.model, e))
                ok = self._box_tuples(u, history, agent, sub, j + 1, chosen, depth, parent_measure)
                chosen.pop()
                if not ok:
                    return False
        return True


def _case_tag(phi: Formula) -> str:
    if isinstance(phi, Atom):
        return "atom"
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Bot):
        return "bot"
    if isinstance(phi, Not):
        return "not"
    if isinstance(phi, And):
        return "and"
    if isinstance(phi, Box):
        return "box"
    if isinstance(phi, DynBox):
        return "union" if isinstance(phi.prog, Union) else "dyn-box"
    return "?"


def m_check(
    model: EpistemicModel,
    world: str,
    history: History,
    phi: Formula,
    *,
    debug: bool = False,
    trace: Optional[TraceFn] = None,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> bool:
    checker = ModelChecker(model, debug=debug, trace=trace, depth_limit=depth_limit)
    return checker.check(world, history, phi)


def model_check(
    pointed: PointedModel,
    phi: Formula,
    *,
    debug: bool = False,
    trace: Optional[TraceFn] = None,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> bool:
    """Truth of ``phi`` at the pointed model, via the recursive checker."""
    return m_check(
        pointed.model,
        pointed.world,
        (),
        phi,
        debug=debug,
        trace=trace,
        depth_limit=depth_limit,
    )
