"""Backlog simulator for half-open connection floods with adaptive tuning.

A deterministic discrete-event model of a server's half-open connection
buffer under mixed regular/attack traffic, a learning-automata controller
that tunes the hold time h and capacity m to maximize Pr / (Pa * Ploss),
and closed-form queueing oracles for validation.
"""

from .automata import Automaton
from .controller import LaController, StaticController, feedback_signal, make_controller
from .domain import (DefenseParams, LaSettings, RequestClass, SimConfig,
                     TrafficModel, config_from_dict, load_config, validate_config)
from .engine import BacklogState, SimReport, run_simulation
from .harness import SweepSpec, run_single, run_sweep, run_validate
from .metrics import WindowMetrics, cumulative_metrics, finalize_window, objective
from .oracle import CtmcSolution, erlang_b, two_class_loss

__all__ = [
    "Automaton", "BacklogState", "CtmcSolution", "DefenseParams",
    "LaController", "LaSettings", "RequestClass", "SimConfig", "SimReport",
    "StaticController", "SweepSpec", "TrafficModel", "WindowMetrics",
    "config_from_dict", "cumulative_metrics", "erlang_b", "feedback_signal",
    "finalize_window", "load_config", "make_controller", "objective",
    "run_simulation", "run_single", "run_sweep", "run_validate",
    "two_class_loss", "validate_config",
]

__version__ = "0.1.0"
