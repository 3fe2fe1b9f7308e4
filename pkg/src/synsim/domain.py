"""Core value types, configuration schema, and validation.

Everything here is an immutable value object; the rest of the package
passes these around freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path


class RequestClass(Enum):
    REGULAR = "regular"
    ATTACK = "attack"


@dataclass(frozen=True)
class DefenseParams:
    """The tunable server pair: half-open hold time and backlog capacity."""

    h: float  # seconds, > 0
    m: int    # backlog slots, >= 1


@dataclass(frozen=True)
class TrafficModel:
    """Two merged Poisson streams: regular at lambda1, attack at k*lambda1.

    mu is the completion rate of the regular three-way handshake; attack
    requests never complete.
    """

    lambda1: float = 10.0
    k: float = 1.0
    mu: float = 100.0

    @property
    def lambda2(self) -> float:
        # always derived, never stored
        return self.k * self.lambda1


@dataclass(frozen=True)
class LaSettings:
    """Action grids and learning rates for the two automata."""

    h_actions: tuple[float, ...] = (0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 75.0)
    m_actions: tuple[int, ...] = (64, 128, 256, 512, 1024)
    a: float = 0.1
    b: float = 0.05
    retain_on_favorable: bool = True


@dataclass(frozen=True)
class SimConfig:
    master_seed: int
    traffic: TrafficModel = field(default_factory=TrafficModel)
    total_requests: int = 50000
    window_size: int = 500
    controller_kind: str = "la"                 # "static" | "la"
    initial_params: DefenseParams = field(
        default_factory=lambda: DefenseParams(75.0, 128))
    la_settings: LaSettings = field(default_factory=LaSettings)
    hold_mode: str = "deterministic"            # "deterministic" | "exponential"
    epsilon_floor: float = 1e-6
    # previous-window keeps the automata supplied with informative feedback;
    # best-so-far stops rewarding almost entirely once an early record is set
    compare_mode: str = "previous-window"       # "best-so-far" | "previous-window"


def _check_action_grid(name: str, grid, violations: list[str]) -> None:
    if len(grid) == 0:
        violations.append(f"{name} must be non-empty")
        return
    if any(v <= 0 for v in grid):
        violations.append(f"{name} values must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        violations.append(f"{name} must be strictly increasing")


def validate_config(config: SimConfig) -> list[str]:
    """Return every violated constraint (empty list means the config is ok).

    Total: never raises; every input maps to ok or a non-empty list.
    """
    v: list[str] = []
    t = config.traffic
    if t.lambda1 < 0:
        v.append("lambda1 must be non-negative")
    if t.k < 0:
        v.append("k must be non-negative")
    if t.mu <= 0:
        v.append("mu must be strictly positive")
    if config.initial_params.h <= 0:
        v.append("h must be strictly positive")
    if config.initial_params.m < 1:
        v.append("m must be at least 1")
    if config.window_size < 1:
        v.append("window_size must be at least 1")
    elif config.total_requests < config.window_size:
        v.append("window exceeds total requests")
    if config.epsilon_floor <= 0:
        v.append("epsilon_floor must be strictly positive")
    if config.controller_kind not in ("static", "la"):
        v.append("controller_kind must be 'static' or 'la'")
    if config.hold_mode not in ("deterministic", "exponential"):
        v.append("hold_mode must be 'deterministic' or 'exponential'")
    if config.compare_mode not in ("best-so-far", "previous-window"):
        v.append("compare_mode must be 'best-so-far' or 'previous-window'")
    la = config.la_settings
    _check_action_grid("h_actions", la.h_actions, v)
    _check_action_grid("m_actions", la.m_actions, v)
    if not 0.0 < la.a < 1.0:
        v.append("reward step a must lie in (0, 1)")
    if not 0.0 <= la.b < 1.0:
        v.append("penalty step b must lie in [0, 1)")
    return v


def config_from_dict(data: dict) -> SimConfig:
    """Build a SimConfig from a plain dict (e.g. parsed JSON).

    Every key is optional except master_seed; keys mirror the field names.
    """
    data = dict(data)
    if "master_seed" not in data:
        raise ValueError("config requires master_seed")
    kwargs: dict = {"master_seed": int(data.pop("master_seed"))}
    if "traffic" in data:
        kwargs["traffic"] = TrafficModel(**data.pop("traffic"))
    if "initial_params" in data:
        ip = data.pop("initial_params")
        kwargs["initial_params"] = DefenseParams(float(ip["h"]), int(ip["m"]))
    if "la_settings" in data:
        ls = dict(data.pop("la_settings"))
        for key in ("h_actions", "m_actions"):
            if key in ls:
                ls[key] = tuple(ls[key])
        kwargs["la_settings"] = LaSettings(**ls)
    for key in ("total_requests", "window_size", "controller_kind",
                "hold_mode", "epsilon_floor", "compare_mode"):
        if key in data:
            kwargs[key] = data.pop(key)
    if data:
        raise ValueError(f"unknown config keys: {sorted(data)}")
    return SimConfig(**kwargs)


def load_config(path: str | Path) -> SimConfig:
    """Load a SimConfig from a UTF-8 JSON document."""
    with open(path, encoding="utf-8") as f:
        return config_from_dict(json.load(f))


def with_seed(config: SimConfig, seed: int) -> SimConfig:
    return replace(config, master_seed=seed)
