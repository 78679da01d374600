"""Independent test oracles.

These deliberately avoid the code paths they are used to check: the
small-model sweep enumerates every pointed model up to three worlds with
bitmask semantics, the announcement oracle evaluates on an explicitly
restricted submodel, and the chain checker walks the model directly.
"""

from __future__ import annotations

import numpy as np

from delkit.core import (
    And,
    Atom,
    Bot,
    Box,
    Formula,
    Not,
    Top,
    agents_of,
    atoms_of,
    has_dynamic,
)
from delkit.kripke import EpistemicModel, PointedModel, evaluate
from delkit.reduction import translate


def valid_on_small_models(phi: Formula, max_worlds: int = 3) -> bool:
    """Exhaustively check ``phi`` at every pointed model with at most
    ``max_worlds`` worlds over the formula's own atoms and agents.

    Dynamic modalities are translated away first; every relation and
    valuation combination over labelled worlds is enumerated, which covers
    all pointed models up to isomorphism because each relabelling occurs.
    """
    psi = translate(phi) if has_dynamic(phi) else phi
    atoms = sorted(atoms_of(psi))
    agents = sorted(agents_of(psi))
    return all(
        _all_models_satisfy(psi, atoms, agents, nw) for nw in range(1, max_worlds + 1)
    )


def _all_models_satisfy(psi: Formula, atoms: list[str], agents: list[str], nw: int) -> bool:
    full = (1 << nw) - 1
    rel_count = 1 << (nw * nw)
    atom_index = {p: i for i, p in enumerate(atoms)}
    agent_index = {a: i for i, a in enumerate(agents)}
    rel_arrays = []
    for ai in range(len(agents)):
        shape = [1] * len(agents)
        shape[ai] = rel_count
        rel_arrays.append(np.arange(rel_count, dtype=np.uint16).reshape(shape))

    for u in range(1 << (nw * len(atoms))):
        memo: dict[Formula, object] = {}

        def sat(f: Formula):
            got = memo.get(f)
            if got is not None:
                return got
            if isinstance(f, Atom):
                out = (u >> (atom_index[f.name] * nw)) & full
            elif isinstance(f, Top):
                out = full
            elif isinstance(f, Bot):
                out = 0
            elif isinstance(f, Not):
                out = sat(f.sub) ^ full
            elif isinstance(f, And):
                out = sat(f.left) & sat(f.right)
            elif isinstance(f, Box):
                blocked = sat(f.sub) ^ full
                rel = rel_arrays[agent_index[f.agent]]
                acc = None
                for i in range(nw):
                    succ = (rel >> (i * nw)) & full
                    bit = ((succ & blocked) == 0).astype(np.uint8) << i
                    acc = bit if acc is None else acc | bit
                out = acc
            else:
                raise TypeError(f"not a static formula: {f!r}")
            memo[f] = out
            return out

        result = sat(psi)
        if isinstance(result, np.ndarray):
            if not np.all(result == full):
                return False
        elif result != full:
            return False
    return True


def enumerate_small_models(atoms: list[str], agents: list[str], max_worlds: int):
    """Yield every pointed model explicitly (tiny signatures only)."""
    from itertools import combinations, product

    for nw in range(1, max_worlds + 1):
        worlds = [f"w{i}" for i in range(nw)]
        pairs = [(v, u) for v in worlds for u in worlds]
        rel_choices = list(product([False, True], repeat=len(pairs)))
        cells = [(p, w) for p in atoms for w in worlds]
        val_choices = list(product([False, True], repeat=len(cells)))
        for rel_bits in product(rel_choices, repeat=len(agents)):
            rel = {
                agent: [p for p, keep in zip(pairs, bits) if keep]
                for agent, bits in zip(agents, rel_bits)
            }
            for val_bits in val_choices:
                val: dict[str, list[str]] = {p: [] for p in atoms}
                for (p, w), keep in zip(cells, val_bits):
                    if keep:
                        val[p].append(w)
                model = EpistemicModel(worlds, rel, val, agents=agents)
                for w in worlds:
                    yield PointedModel(model, w)


def announcement_eval(model: EpistemicModel, world: str, pre: Formula, body: Formula) -> bool:
    """Truth of "after announcing pre, body" via explicit submodel restriction."""
    if not evaluate(model, world, pre):
        return True
    keep = {w for w in model.worlds if evaluate(model, w, pre)}
    sub = EpistemicModel(
        [w for w in model.worlds if w in keep],
        {
            a: [(v, u) for v, u in ps if v in keep and u in keep]
            for a, ps in model.rel.items()
        },
        {p: [w for w in ws if w in keep] for p, ws in model.val.items()},
        agents=model.agents,
    )
    return evaluate(sub, world, body)


def has_dead_end_path(model: EpistemicModel, world: str, agent: str, length: int) -> bool:
    """Is there a walk of exactly ``length`` steps ending in a dead end?"""
    memo: dict[tuple[str, int], bool] = {}

    def go(v: str, remaining: int) -> bool:
        key = (v, remaining)
        if key in memo:
            return memo[key]
        succ = model.successors(v, agent)
        if remaining == 0:
            out = not succ
        else:
            out = any(go(u, remaining - 1) for u in succ)
        memo[key] = out
        return out

    return go(world, length)
