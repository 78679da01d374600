"""Grid-tiling instances, a backtracking tiler, and the reduction to
satisfiability.

A tiling instance is a finite set of tile types (4-tuples of edge colors),
an origin tile, and ``n`` with grid side ``k + 1`` for ``k = 2**n``.  The
brute-force tiler fills the ``(k+1) x (k+1)`` grid so that the origin tile
sits at ``(0, 0)``, vertically adjacent tiles agree on their shared
horizontal edge, and horizontally adjacent tiles agree on their shared
vertical edge.

The reduction emits a single-agent formula that is satisfiable exactly when
such a tiling exists.  Its models are forced (up to depth ``4n``) to look
like binary trees whose leaves enumerate every valuation of ``4n`` bits:
two coordinate pairs, each of ``n`` bits per axis, so each leaf names one
cell of a first and one cell of a second copy of the ``k x k`` coordinate
space ``0 .. 2**n - 1``.  Tile-type atoms at the leaves describe both
copies, comparator formulas relate coordinates that are equal or offset by
one, and dynamic modalities over chains of probing event models force leaves
that name the same cell to carry the same tile.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .core import (
    And,
    Atom,
    Box,
    DynBox,
    EventModel,
    Formula,
    Not,
    PointedEvent,
    TOP,
    Union,
    box_power,
    conj,
    dia,
    disj,
    iff,
    impl,
)
from .kripke import EpistemicModel, PointedModel
from .qbf import OracleBudgetExceeded

__all__ = [
    "TileType",
    "TilingInstance",
    "TilingReduction",
    "tiles_from_json",
    "tiling_brute",
    "check_tiling",
    "tiling_reduce",
    "witness_model",
    "TILING_AGENT",
]

TILING_AGENT = "a"

_TILE_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")

Grid = dict[tuple[int, int], "TileType"]


@dataclass(frozen=True)
class TileType:
    """Four edge colors; ``name`` doubles as the atom suffix in formulas."""

    name: str
    left: str
    right: str
    up: str
    down: str

    def __post_init__(self) -> None:
        if not _TILE_ID_RE.match(self.name):
            raise ValueError(f"tile id must match [A-Za-z0-9_]+: {self.name!r}")


@dataclass(frozen=True)
class TilingInstance:
    tiles: tuple[TileType, ...]
    origin: TileType
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.tiles:
            raise ValueError("at least one tile type is required")
        names = [t.name for t in self.tiles]
        if len(set(names)) != len(names):
            raise ValueError("duplicate tile ids")
        if self.origin not in self.tiles:
            raise ValueError("origin tile must belong to the tile set")

    @property
    def k(self) -> int:
        return 2**self.n

    @property
    def side(self) -> int:
        return self.k + 1


def tiles_from_json(obj: Mapping | str, n: int) -> TilingInstance:
    """Build an instance from the tile JSON shape ``{"tiles": [...], "t0": id}``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    tiles = tuple(
        TileType(t["id"], t["left"], t["right"], t["up"], t["down"]) for t in obj["tiles"]
    )
    by_name = {t.name: t for t in tiles}
    t0 = obj["t0"]
    if t0 not in by_name:
        raise ValueError(f"origin tile {t0!r} not among the tile ids")
    return TilingInstance(tiles, by_name[t0], n)


def check_tiling(instance: TilingInstance, grid: Grid) -> bool:
    """Validate the origin and both edge-matching constraints on a full grid."""
    side = instance.side
    for x in range(side):
        for y in range(side):
            if (x, y) not in grid or grid[(x, y)] not in instance.tiles:
                return False
    if grid[(0, 0)] != instance.origin:
        return False
    for x in range(side):
        for y in range(side - 1):
            if grid[(x, y)].up != grid[(x, y + 1)].down:
                return False
    for x in range(side - 1):
        for y in range(side):
            if grid[(x, y)].right != grid[(x + 1, y)].left:
                return False
    return True


def tiling_brute(
    instance: TilingInstance, max_steps: int = 2_000_000
) -> Optional[Grid]:
    """Backtracking search for a tiling; ``None`` when no tiling exists."""
    side = instance.side
    cells = [(x, y) for y in range(side) for x in range(side)]
    grid: Grid = {}
    steps = 0

    def fits(x: int, y: int, tile: TileType) -> bool:
        if x > 0 and grid[(x - 1, y)].right != tile.left:
            return False
        if y > 0 and grid[(x, y - 1)].up != tile.down:
            return False
        return True

    def place(i: int) -> bool:
        nonlocal steps
        if i == len(cells):
            return True
        x, y = cells[i]
        options = (instance.origin,) if (x, y) == (0, 0) else instance.tiles
        for tile in options:
            steps += 1
            if steps > max_steps:
                raise OracleBudgetExceeded(f"tiler exceeded {max_steps} placements")
            if fits(x, y, tile):
                grid[(x, y)] = tile
                if place(i + 1):
                    return True
                del grid[(x, y)]
        return False

    if place(0):
        assert check_tiling(instance, grid)
        return dict(grid)
    return None


# ---------------------------------------------------------------------------
# Reduction to satisfiability
# ---------------------------------------------------------------------------


def bit_atom(j: int) -> Atom:
    return Atom(f"p{j}")


def first_tile_atom(tile: TileType) -> Atom:
    return Atom(f"first_{tile.name}")


def second_tile_atom(tile: TileType) -> Atom:
    return Atom(f"second_{tile.name}")


def _coords_equal(offset: int, lo: int, hi: int) -> Formula:
    """First coordinate bits ``lo..hi-1`` equal the second copy ``2n`` later."""
    return conj(iff(bit_atom(j), bit_atom(j + offset)) for j in range(lo, hi))


def _coord_successor(offset: int, lo: int, hi: int) -> Formula:
    """First coordinate equals second plus one (bit 0 most significant).

    Disjunction over the position ``i`` where the carry stops: higher-order
    bits agree, bit ``i`` flips 0 to 1, and all lower-order bits flip 1 to 0.
    """
    cases = []
    for i in range(lo, hi):
        parts: list[Formula] = [
            iff(bit_atom(j + offset), bit_atom(j)) for j in range(lo, i)
        ]
        parts.append(Not(bit_atom(i + offset)))
        parts.append(bit_atom(i))
        parts.extend(
            And(bit_atom(j + offset), Not(bit_atom(j))) for j in range(i + 1, hi)
        )
        cases.append(conj(parts))
    return disj(cases)


def probe_event_model(bit: int, negated: bool, depth: int) -> EventModel:
    """Chain of ``depth + 1`` events whose last precondition probes a literal.

    Updating a depth-``depth`` tree by this model prunes exactly the leaves
    where the literal fails, leaving the rest of the tree intact.
    """
    events = [f"e{j}" for j in range(depth + 1)]
    edges = {(f"e{j}", f"e{j + 1}") for j in range(depth)}
    literal: Formula = Not(bit_atom(bit)) if negated else bit_atom(bit)
    pre: dict[str, Formula] = {e: TOP for e in events[:-1]}
    pre[events[-1]] = literal
    name = f"E_np{bit}" if negated else f"E_p{bit}"
    return EventModel(name, events, {TILING_AGENT: edges}, pre)


@dataclass(frozen=True)
class TilingReduction:
    instance: TilingInstance
    formula: Formula
    event_models: tuple[EventModel, ...]

    @property
    def atoms(self) -> tuple[str, ...]:
        n4 = 4 * self.instance.n
        bits = tuple(f"p{j}" for j in range(n4))
        firsts = tuple(first_tile_atom(t).name for t in self.instance.tiles)
        seconds = tuple(second_tile_atom(t).name for t in self.instance.tiles)
        return bits + firsts + seconds


def tiling_reduce(instance: TilingInstance) -> TilingReduction:
    """Formula satisfiable exactly when the instance tiles."""
    a = TILING_AGENT
    n = instance.n
    n4 = 4 * n
    tiles = instance.tiles

    # Bit layout: x1 in bits [0, n), y1 in [n, 2n), x2 in [2n, 3n), y2 in [3n, 4n).
    x_equal = _coords_equal(2 * n, 0, n)
    y_equal = _coords_equal(2 * n, n, 2 * n)
    x_succ = _coord_successor(2 * n, 0, n)
    y_succ = _coord_successor(2 * n, n, 2 * n)

    # Every valuation of the 4n bits appears on some depth-4n path, and bits
    # chosen near the root stay constant below.
    all_valuations = conj(
        box_power(
            a,
            level,
            conj(
                [dia(a, bit_atom(level)), dia(a, Not(bit_atom(level)))]
                + [
                    And(
                        impl(bit_atom(i), Box(a, bit_atom(i))),
                        impl(Not(bit_atom(i)), Box(a, Not(bit_atom(i)))),
                    )
                    for i in range(level)
                ]
            ),
        )
        for level in range(n4)
    )

    some_tile = box_power(
        a, n4, And(disj(first_tile_atom(t) for t in tiles), disj(second_tile_atom(t) for t in tiles))
    )
    at_most_one = box_power(
        a,
        n4,
        conj(
            And(
                impl(first_tile_atom(t), Not(first_tile_atom(t2))),
                impl(second_tile_atom(t), Not(second_tile_atom(t2))),
            )
            for t in tiles
            for t2 in tiles
            if t != t2
        ),
    )
    copies_agree = box_power(
        a,
        n4,
        impl(And(x_equal, y_equal), conj(iff(first_tile_atom(t), second_tile_atom(t)) for t in tiles)),
    )

    # Leaves naming the same cell of a copy must carry the same tile: pin
    # down one coordinate valuation with unions of literal probes, then ask
    # for a uniform tile at the surviving leaves.
    probes: list[EventModel] = []

    def uniform_tile(bit_range: range, tile_atoms) -> Formula:
        body = disj(box_power(a, n4, atom) for atom in tile_atoms)
        for bit in reversed(bit_range):
            pos = probe_event_model(bit, False, n4)
            neg = probe_event_model(bit, True, n4)
            probes.extend((pos, neg))
            prog = Union(PointedEvent(pos, "e0"), PointedEvent(neg, "e0"))
            body = DynBox(prog, body)
        return body

    first_uniform = uniform_tile(range(0, 2 * n), [first_tile_atom(t) for t in tiles])
    second_uniform = uniform_tile(range(2 * n, 4 * n), [second_tile_atom(t) for t in tiles])

    origin = box_power(
        a,
        n4,
        impl(conj(Not(bit_atom(j)) for j in range(n4)), first_tile_atom(instance.origin)),
    )
    vertical = box_power(
        a,
        n4,
        impl(
            And(x_equal, y_succ),
            conj(
                impl(
                    first_tile_atom(t),
                    disj(second_tile_atom(t2) for t2 in tiles if t2.up == t.down),
                )
                for t in tiles
            ),
        ),
    )
    horizontal = box_power(
        a,
        n4,
        impl(
            And(x_succ, y_equal),
            conj(
                impl(
                    first_tile_atom(t),
                    disj(second_tile_atom(t2) for t2 in tiles if t2.right == t.left),
                )
                for t in tiles
            ),
        ),
    )

    formula = conj(
        [
            all_valuations,
            some_tile,
            at_most_one,
            copies_agree,
            first_uniform,
            second_uniform,
            origin,
            vertical,
            horizontal,
        ]
    )
    return TilingReduction(instance, formula, tuple(probes))


def witness_model(instance: TilingInstance, grid: Grid) -> PointedModel:
    """Binary tree of depth ``4n`` whose leaves carry the two tiling copies.

    ``grid`` must be a valid tiling; the tree embeds its restriction to the
    ``k x k`` coordinate block ``0 .. 2**n - 1`` twice, as demanded by the
    reduction formula.
    """
    if not check_tiling(instance, grid):
        raise ValueError("grid is not a valid tiling of the instance")
    n = instance.n
    n4 = 4 * n
    worlds: list[str] = []
    edges: set[tuple[str, str]] = set()
    val: dict[str, set[str]] = {}

    def decode(bits: str, lo: int) -> int:
        return int(bits[lo : lo + n], 2)

    frontier = [""]
    while frontier:
        bits = frontier.pop()
        world = "n" + bits
        worlds.append(world)
        for j, b in enumerate(bits):
            if b == "1":
                val.setdefault(f"p{j}", set()).add(world)
        if len(bits) < n4:
            for b in ("0", "1"):
                edges.add((world, "n" + bits + b))
                frontier.append(bits + b)
        else:
            x1, y1 = decode(bits, 0), decode(bits, n)
            x2, y2 = decode(bits, 2 * n), decode(bits, 3 * n)
            val.setdefault(first_tile_atom(grid[(x1, y1)]).name, set()).add(world)
            val.setdefault(second_tile_atom(grid[(x2, y2)]).name, set()).add(world)
    model = EpistemicModel(sorted(worlds), {TILING_AGENT: edges}, val)
    return PointedModel(model, "n")
