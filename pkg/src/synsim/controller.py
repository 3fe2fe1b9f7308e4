"""Per-window decision policies: the static baseline and the adaptive tuner.

The adaptive controller runs two independent automata, one over the hold
time grid and one over the capacity grid.  At every window boundary it
scores the finished window by J, converts the score to a binary signal
(0 = favorable, 1 = unfavorable) against a memory of the best (or the
previous) objective, updates both automata with that shared signal, and
emits the next (h, m).
"""

from __future__ import annotations

import numpy as np

from .automata import Automaton
from .domain import DefenseParams, LaSettings
from .metrics import WindowMetrics


def feedback_signal(j_window: float, j_best: float, j_prev: float,
                    compare_mode: str) -> int:
    """0 (favorable) iff the window's J strictly beats the baseline, else 1."""
    baseline = j_best if compare_mode == "best-so-far" else j_prev
    return 0 if j_window > baseline else 1


class StaticController:
    """Fixed (h, m) at every round; models the stock Linux configuration."""

    kind = "static"

    def __init__(self, params: DefenseParams):
        self.params = params
        self.round = 0

    def initial_params(self, rng: np.random.Generator) -> DefenseParams:
        return self.params

    def on_window_end(self, metrics: WindowMetrics,
                      rng: np.random.Generator) -> DefenseParams:
        self.round += 1
        return self.params


class LaController:
    """Two-automata tuner with best-objective memory.

    Round 0 selects from the uniform priors without any update; from round
    1 on, each window's J produces the shared feedback signal, both
    automata are updated at their last selected indices, and the next pair
    is either retained (favorable, retain_on_favorable) or re-sampled from
    the updated vectors.
    """

    kind = "la"

    def __init__(self, settings: LaSettings, compare_mode: str = "best-so-far"):
        self.settings = settings
        self.compare_mode = compare_mode
        self.h_automaton = Automaton(settings.h_actions, settings.a, settings.b)
        self.m_automaton = Automaton(settings.m_actions, settings.a, settings.b)
        self.j_best = 0.0
        self.j_prev = 0.0
        self.best_params: DefenseParams | None = None
        self.current: DefenseParams | None = None
        self.round = 0
        self.trace: list[tuple[int, np.ndarray, np.ndarray]] = []

    def _sample(self, rng: np.random.Generator) -> DefenseParams:
        hi = self.h_automaton.select(rng)
        mi = self.m_automaton.select(rng)
        return DefenseParams(self.h_automaton.actions[hi],
                             self.m_automaton.actions[mi])

    def _record(self) -> None:
        self.trace.append((self.round, self.h_automaton.p.copy(),
                           self.m_automaton.p.copy()))

    def initial_params(self, rng: np.random.Generator) -> DefenseParams:
        self.current = self._sample(rng)
        self._record()
        return self.current

    def on_window_end(self, metrics: WindowMetrics,
                      rng: np.random.Generator) -> DefenseParams:
        if self.current is None:
            # round 0 without a prior initial_params call
            params = self.initial_params(rng)
            self.round += 1
            return params
        beta = feedback_signal(metrics.J, self.j_best, self.j_prev,
                               self.compare_mode)
        if metrics.J > self.j_best:
            self.j_best = metrics.J
            self.best_params = self.current
        self.j_prev = metrics.J
        hi = self.h_automaton.last_selected
        mi = self.m_automaton.last_selected
        if beta == 0:
            self.h_automaton.reward(hi)
            self.m_automaton.reward(mi)
        else:
            self.h_automaton.penalty(hi)
            self.m_automaton.penalty(mi)
        if beta == 0 and self.settings.retain_on_favorable:
            # keep the winning pair; last_selected stays valid for next round
            pass
        else:
            self.current = self._sample(rng)
        self.round += 1
        self._record()
        return self.current


def make_controller(config) -> StaticController | LaController:
    if config.controller_kind == "static":
        return StaticController(config.initial_params)
    return LaController(config.la_settings, config.compare_mode)
