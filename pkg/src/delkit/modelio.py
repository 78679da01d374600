"""JSON file formats for models and generated instance bundles.

Epistemic model files::

    {"agents": ["1", "2"], "worlds": ["w", "u"],
     "relations": {"1": [["w", "w"]], "2": [["w", "w"], ["w", "u"]]},
     "valuation": {"p": ["w"]}, "point": "w"}

Event model files::

    {"name": "E1", "agents": ["1", "2"], "events": ["w1", "u1"],
     "relations": {...}, "pre": {"w1": "p", "u1": "top"}, "point": "w1"}

Preconditions are formula text in the package grammar and may reference
event models defined in earlier files, so loading order matters.  A bundle
is a directory with a manifest, the model files, and a formula text file.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Optional

from .core import EventModel, Formula, event_models_of
from .kripke import EpistemicModel, PointedModel
from .syntax import FormulaSyntaxError, parse_formula, print_formula

__all__ = [
    "ModelFormatError",
    "epistemic_model_from_json",
    "epistemic_model_to_json",
    "event_model_from_json",
    "event_model_to_json",
    "load_epistemic_model",
    "load_event_model",
    "load_event_models",
    "save_json",
    "write_bundle",
    "load_bundle",
]


class ModelFormatError(ValueError):
    """A model file does not match the expected JSON shape."""


def _pairs(raw, what: str) -> list[tuple[str, str]]:
    out = []
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ModelFormatError(f"{what}: relation entries must be pairs, found {item!r}")
        out.append((str(item[0]), str(item[1])))
    return out


def epistemic_model_from_json(obj: Mapping) -> PointedModel:
    try:
        worlds = [str(w) for w in obj["worlds"]]
        relations = {
            str(agent): _pairs(pairs, "relations") for agent, pairs in obj.get("relations", {}).items()
        }
        valuation = {
            str(atom): [str(w) for w in holders]
            for atom, holders in obj.get("valuation", {}).items()
        }
        agents = [str(a) for a in obj.get("agents", [])]
        point = obj["point"]
    except KeyError as exc:
        raise ModelFormatError(f"missing key {exc.args[0]!r} in epistemic model") from None
    try:
        model = EpistemicModel(worlds, relations, valuation, agents=agents)
        return PointedModel(model, str(point))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def epistemic_model_to_json(pointed: PointedModel) -> dict:
    model = pointed.model
    return {
        "agents": sorted(model.agents),
        "worlds": list(model.worlds),
        "relations": {a: sorted([list(p) for p in ps]) for a, ps in sorted(model.rel.items())},
        "valuation": {p: sorted(ws) for p, ws in sorted(model.val.items())},
        "point": pointed.world,
    }


def event_model_from_json(obj: Mapping, env: Mapping[str, EventModel] | None = None) -> EventModel:
    env = dict(env or {})
    try:
        name = str(obj["name"])
        events = [str(e) for e in obj["events"]]
        relations = {
            str(agent): _pairs(pairs, name) for agent, pairs in obj.get("relations", {}).items()
        }
        agents = [str(a) for a in obj.get("agents", [])]
        pre_raw = obj["pre"]
    except KeyError as exc:
        raise ModelFormatError(f"missing key {exc.args[0]!r} in event model") from None
    pre: dict[str, Formula] = {}
    for event, text in pre_raw.items():
        try:
            pre[str(event)] = parse_formula(str(text), env, agents=agents)
        except FormulaSyntaxError as exc:
            raise ModelFormatError(
                f"event model {name!r}, precondition of {event!r}: {exc}"
            ) from None
    try:
        return EventModel(name, events, relations, pre, agents=agents)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def event_model_to_json(model: EventModel, point: Optional[str] = None) -> dict:
    obj = {
        "name": model.name,
        "agents": sorted(model.agents),
        "events": list(model.events),
        "relations": {a: sorted([list(p) for p in ps]) for a, ps in sorted(model.rel.items())},
        "pre": {e: print_formula(model.pre[e]) for e in model.events},
    }
    if point is not None:
        obj["point"] = point
    return obj


def load_epistemic_model(path: str | Path) -> PointedModel:
    return epistemic_model_from_json(_read_json(path))


def load_event_model(path: str | Path, env: Mapping[str, EventModel] | None = None) -> EventModel:
    return event_model_from_json(_read_json(path), env)


def load_event_models(paths: list[str] | list[Path]) -> dict[str, EventModel]:
    """Load event model files in order; later files may reference earlier names."""
    env: dict[str, EventModel] = {}
    for path in paths:
        model = load_event_model(path, env)
        env[model.name] = model
    return env


def _read_json(path: str | Path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def save_json(path: str | Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _dependency_order(models: list[EventModel]) -> list[EventModel]:
    """Nested event models (inside preconditions) before the models using them."""
    ordered: list[EventModel] = []
    seen: set[str] = set()

    def visit(model: EventModel) -> None:
        if model.name in seen:
            return
        seen.add(model.name)
        for e in model.events:
            for nested in event_models_of(model.pre[e]).values():
                visit(nested)
        ordered.append(model)

    for m in models:
        visit(m)
    return ordered


def write_bundle(
    directory: str | Path,
    *,
    kind: str,
    parameters: Mapping,
    formula: Formula,
    event_models: list[EventModel],
    model: Optional[PointedModel] = None,
) -> Path:
    """Write a generated instance as a directory of files; returns the path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ordered = _dependency_order(list(event_models))
    event_files = []
    for em in ordered:
        fname = f"event_{em.name}.json"
        save_json(directory / fname, event_model_to_json(em))
        event_files.append(fname)
    manifest = {
        "kind": kind,
        "parameters": dict(parameters),
        "model": "model.json" if model is not None else None,
        "event_models": event_files,
        "formula": "formula.txt",
    }
    if model is not None:
        save_json(directory / "model.json", epistemic_model_to_json(model))
    (directory / "formula.txt").write_text(print_formula(formula) + "\n", encoding="utf-8")
    save_json(directory / "manifest.json", manifest)
    return directory


def load_bundle(directory: str | Path) -> tuple[dict, Optional[PointedModel], dict[str, EventModel], Formula]:
    """Read a bundle back: manifest, optional model, event env, and formula."""
    directory = Path(directory)
    manifest = _read_json(directory / "manifest.json")
    env = load_event_models([directory / f for f in manifest["event_models"]])
    model = None
    if manifest.get("model"):
        model = load_epistemic_model(directory / manifest["model"])
    text = (directory / manifest["formula"]).read_text(encoding="utf-8")
    agents = sorted(model.model.agents) if model is not None else []
    formula = parse_formula(text, env, agents=agents)
    return manifest, model, env, formula
