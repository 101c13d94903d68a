"""JSON loading and saving for signal structures and scenario configs.

Structure document:
    {"states": [...], "signals": [...], "likelihood": [[row per state]]}
with rows in state order and columns in signal order.

Scenario document:
    {"structure": {...}, "prior": [...], "eta": x, "mode": "private"|"public",
     "horizon": N, "episodes": N, "seed": N, "convergence_tol": x,
     "true_state": N | null}
Unknown keys are rejected outright; the simulation keys fall back to the
ScenarioConfig defaults when omitted.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid
from .model import Belief, SignalSpace, SignalStructure, StateSpace, validate_structure
from .simulate import ScenarioConfig

__all__ = [
    "structure_from_dict",
    "structure_to_dict",
    "scenario_from_dict",
    "scenario_to_dict",
    "load_structure",
    "load_scenario",
    "save_scenario",
]

_STRUCTURE_KEYS = {"states", "signals", "likelihood"}
_SCENARIO_KEYS = {
    "structure", "prior", "eta", "mode",
    "horizon", "episodes", "seed", "convergence_tol", "true_state",
}
_REQUIRED_SCENARIO_KEYS = {"structure", "prior", "eta", "mode"}


def structure_from_dict(doc: dict) -> SignalStructure:
    if not isinstance(doc, dict):
        raise ConfigInvalid(f"structure must be an object, got {type(doc).__name__}")
    unknown = set(doc) - _STRUCTURE_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown structure keys: {sorted(unknown)}")
    missing = _STRUCTURE_KEYS - set(doc)
    if missing:
        raise ConfigInvalid(f"missing structure keys: {sorted(missing)}")
    structure = SignalStructure(
        StateSpace(np.asarray(doc["states"], dtype=float)),
        SignalSpace(tuple(doc["signals"])),
        np.asarray(doc["likelihood"], dtype=float),
    )
    validate_structure(structure)
    return structure


def structure_to_dict(structure: SignalStructure) -> dict:
    return {
        "states": [float(v) for v in structure.states.values],
        "signals": list(structure.signals.labels),
        "likelihood": [[float(x) for x in row] for row in structure.likelihood],
    }


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigInvalid(f"scenario must be an object, got {type(doc).__name__}")
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown scenario keys: {sorted(unknown)}")
    missing = _REQUIRED_SCENARIO_KEYS - set(doc)
    if missing:
        raise ConfigInvalid(f"missing scenario keys: {sorted(missing)}")

    structure = structure_from_dict(doc["structure"])
    try:
        prior = Belief(np.asarray(doc["prior"], dtype=float))
    except Exception as exc:
        raise ConfigInvalid(f"invalid prior: {exc}") from exc

    kwargs = {}
    for key in ("horizon", "episodes", "seed"):
        if key in doc:
            kwargs[key] = int(doc[key])
    if "convergence_tol" in doc:
        kwargs["convergence_tol"] = float(doc["convergence_tol"])
    if "true_state" in doc and doc["true_state"] is not None:
        kwargs["true_state"] = int(doc["true_state"])

    return ScenarioConfig(
        structure=structure,
        prior=prior,
        eta=float(doc["eta"]),
        mode=str(doc["mode"]),
        **kwargs,
    )


def scenario_to_dict(config: ScenarioConfig) -> dict:
    return {
        "structure": structure_to_dict(config.structure),
        "prior": [float(w) for w in config.prior.weights],
        "eta": float(config.eta),
        "mode": config.mode,
        "horizon": config.horizon,
        "episodes": config.episodes,
        "seed": config.seed,
        "convergence_tol": config.convergence_tol,
        "true_state": config.true_state,
    }


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path} is not valid JSON: {exc}") from exc


def load_structure(path) -> SignalStructure:
    return structure_from_dict(_load_json(path))


def load_scenario(path) -> ScenarioConfig:
    return scenario_from_dict(_load_json(path))


def save_scenario(config: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(config), indent=2, sort_keys=True) + "\n")
