"""Deterministic discrete-event loop for the half-open connection backlog.

Two merged Poisson arrival streams feed a capacity-m buffer.  A regular
entry leaves by handshake completion (Exp(mu)) or by hitting the hold
time h, whichever comes first; an attack entry only ever times out.  The
controller is consulted at every window boundary and may change (h, m)
mid-run: h is retroactive (residents past the new timeout are evicted on
the spot), an m shrink evicts nothing and simply blocks admissions until
the buffer drains below the new cap.

One master seed derives four independent RNG streams (regular arrivals,
attack arrivals, entry lifetimes, action selection), so swapping the
controller never perturbs the traffic sample path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .controller import make_controller
from .domain import DefenseParams, RequestClass, SimConfig, validate_config
from .metrics import WindowMetrics, cumulative_metrics, finalize_window

_INF = math.inf

# event-kind labels used in traces
EV_ADMIT = "admit"
EV_BLOCK = "block"
EV_COMPLETE = "complete"
EV_EXPIRE = "expire"
EV_PARAMS = "params"


class _ExpStream:
    """Blockwise exponential inter-arrival sampler; rate 0 never fires."""

    __slots__ = ("rng", "rate", "buf", "pos")

    def __init__(self, rng: np.random.Generator, rate: float, block: int = 8192):
        self.rng = rng
        self.rate = rate
        self.buf = rng.exponential(1.0 / rate, block) if rate > 0 else None
        self.pos = 0

    def draw(self) -> float:
        buf = self.buf
        if buf is None:
            return _INF
        if self.pos >= len(buf):
            self.buf = buf = self.rng.exponential(1.0 / self.rate, len(buf))
            self.pos = 0
        v = buf[self.pos]
        self.pos += 1
        return float(v)


class _Entry:
    __slots__ = ("cls", "admit", "service", "hold_unit", "dep", "cause", "resident")

    def __init__(self, cls, admit, service, hold_unit):
        self.cls = cls            # RequestClass
        self.admit = admit
        self.service = service    # absolute completion delay; inf for attack
        self.hold_unit = hold_unit  # Exp(1) draw, None in deterministic mode
        self.dep = 0.0
        self.cause = EV_EXPIRE
        self.resident = True

    def schedule(self, h: float) -> None:
        """Recompute departure time and cause under hold time h."""
        hold = h if self.hold_unit is None else self.hold_unit * h
        timeout = self.admit + hold
        completion = self.admit + self.service
        if completion < timeout:
            self.dep = completion
            self.cause = EV_COMPLETE
        else:
            self.dep = timeout
            self.cause = EV_EXPIRE


@dataclass
class EvictionSummary:
    regular: int = 0
    attack: int = 0


@dataclass
class RunTotals:
    """Whole-run per-class conservation counters (drain included)."""

    arrivals: dict = field(default_factory=lambda: {RequestClass.REGULAR: 0,
                                                    RequestClass.ATTACK: 0})
    admitted: dict = field(default_factory=lambda: {RequestClass.REGULAR: 0,
                                                    RequestClass.ATTACK: 0})
    blocked: dict = field(default_factory=lambda: {RequestClass.REGULAR: 0,
                                                   RequestClass.ATTACK: 0})
    completed: dict = field(default_factory=lambda: {RequestClass.REGULAR: 0,
                                                     RequestClass.ATTACK: 0})
    expired: dict = field(default_factory=lambda: {RequestClass.REGULAR: 0,
                                                   RequestClass.ATTACK: 0})
    residents_at_drain: dict = field(default_factory=lambda: {RequestClass.REGULAR: 0,
                                                              RequestClass.ATTACK: 0})


@dataclass
class SimReport:
    windows: list[WindowMetrics]
    param_trajectory: list[tuple[int, DefenseParams]]
    cumulative: WindowMetrics
    horizon: float
    seed_echo: int
    totals: RunTotals

    @property
    def legit_expired_fraction(self) -> float:
        admitted = self.totals.admitted[RequestClass.REGULAR]
        return self.totals.expired[RequestClass.REGULAR] / admitted if admitted else 0.0


class BacklogState:
    """Mutable backlog: residents, current (h, m), occupancy integrals, counts."""

    def __init__(self, params: DefenseParams, hold_mode: str, mu: float,
                 lifetime_rng: np.random.Generator):
        self.params = params
        self.hold_mode = hold_mode
        self.mu = mu
        self.lifetime = _ExpStream(lifetime_rng, 1.0)  # unit-rate draws
        self.residents: set[_Entry] = set()
        self.n_regular = 0
        self.n_attack = 0
        self.clock = 0.0
        self.heap: list = []
        self._seq = 0
        # raw slot-seconds and normalized (n/m) integrals
        self.occupancy_integral_regular = 0.0
        self.occupancy_integral_attack = 0.0
        self.normalized_integral_regular = 0.0
        self.normalized_integral_attack = 0.0
        self.arrivals = {RequestClass.REGULAR: 0, RequestClass.ATTACK: 0}
        self.admitted = {RequestClass.REGULAR: 0, RequestClass.ATTACK: 0}
        self.blocked = {RequestClass.REGULAR: 0, RequestClass.ATTACK: 0}
        self.completed = {RequestClass.REGULAR: 0, RequestClass.ATTACK: 0}
        self.expired = {RequestClass.REGULAR: 0, RequestClass.ATTACK: 0}

    # -- time ------------------------------------------------------------

    def advance_to(self, t: float) -> None:
        """Accumulate occupancy integrals up to t; m is constant in between."""
        dt = t - self.clock
        if dt > 0.0:
            m = self.params.m
            nr = self.n_regular
            na = self.n_attack
            self.occupancy_integral_regular += dt * nr
            self.occupancy_integral_attack += dt * na
            self.normalized_integral_regular += dt * nr / m
            self.normalized_integral_attack += dt * na / m
        self.clock = t

    # -- admissions ------------------------------------------------------

    def admit_or_block(self, cls: RequestClass, now: float) -> _Entry | None:
        """Admit if a slot is free, else count a block.  Returns the entry."""
        self.arrivals[cls] += 1
        if self.n_regular + self.n_attack >= self.params.m:
            self.blocked[cls] += 1
            return None
        self.admitted[cls] += 1
        if cls is RequestClass.REGULAR:
            service = self.lifetime.draw() / self.mu
            self.n_regular += 1
        else:
            service = _INF
            self.n_attack += 1
        hold_unit = self.lifetime.draw() if self.hold_mode == "exponential" else None
        entry = _Entry(cls, now, service, hold_unit)
        entry.schedule(self.params.h)
        self.residents.add(entry)
        self._push(entry)
        return entry

    def _push(self, entry: _Entry) -> None:
        self._seq += 1
        heappush(self.heap, (entry.dep, self._seq, entry))

    # -- departures ------------------------------------------------------

    def depart(self, entry: _Entry) -> None:
        entry.resident = False
        self.residents.discard(entry)
        if entry.cls is RequestClass.REGULAR:
            self.n_regular -= 1
        else:
            self.n_attack -= 1
        if entry.cause == EV_COMPLETE:
            self.completed[entry.cls] += 1
        else:
            self.expired[entry.cls] += 1

    def pop_due(self, until: float) -> _Entry | None:
        """Pop the next valid departure with dep <= until, skipping stale items."""
        heap = self.heap
        while heap:
            dep, _, entry = heap[0]
            if dep > until:
                return None
            heappop(heap)
            if entry.resident and entry.dep == dep:
                return entry
        return None

    # -- parameter changes -----------------------------------------------

    def apply_defense_params(self, new: DefenseParams, now: float) -> EvictionSummary:
        """Install new (h, m).  h is retroactive; m-shrink never evicts."""
        summary = EvictionSummary()
        h_changed = new.h != self.params.h
        self.params = new
        if not h_changed:
            return summary
        evicted = []
        for entry in self.residents:
            entry.schedule(new.h)
            if entry.dep <= now:
                evicted.append(entry)
            else:
                self._push(entry)
        for entry in evicted:
            entry.cause = EV_EXPIRE
            self.depart(entry)
            if entry.cls is RequestClass.REGULAR:
                summary.regular += 1
            else:
                summary.attack += 1
        return summary

    def snapshot(self) -> tuple:
        return (self.arrivals[RequestClass.REGULAR], self.arrivals[RequestClass.ATTACK],
                self.blocked[RequestClass.REGULAR], self.blocked[RequestClass.ATTACK],
                self.completed[RequestClass.REGULAR],
                self.expired[RequestClass.REGULAR],
                self.normalized_integral_regular, self.normalized_integral_attack,
                self.clock)


class ConservationError(AssertionError):
    pass


def _audit(state: BacklogState, totals: RunTotals) -> None:
    for cls in RequestClass:
        if totals.admitted[cls] != (totals.completed[cls] + totals.expired[cls]
                                    + totals.residents_at_drain[cls]):
            raise ConservationError(f"{cls.value}: admitted != completed + expired + residents")
        if totals.admitted[cls] + totals.blocked[cls] != totals.arrivals[cls]:
            raise ConservationError(f"{cls.value}: admitted + blocked != arrivals")


def run_simulation(config: SimConfig, controller=None, seed: int | None = None,
                   event_trace=None) -> SimReport:
    """Run the full event loop and return a complete report.

    Same (config, seed) always yields a bit-identical report.  event_trace,
    if given, is a writable text file receiving one tab-separated line per
    event: time, kind, class, occupancy-after, m, h.
    """
    violations = validate_config(config)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))
    if seed is None:
        seed = config.master_seed
    if controller is None:
        controller = make_controller(config)

    ss = np.random.SeedSequence(seed)
    rng_reg, rng_att, rng_life, rng_la = (np.random.default_rng(c)
                                          for c in ss.spawn(4))
    traffic = config.traffic
    if traffic.lambda1 == 0.0 and traffic.lambda2 == 0.0 and config.total_requests > 0:
        raise ValueError("no arrival stream has positive rate")
    reg_stream = _ExpStream(rng_reg, traffic.lambda1)
    att_stream = _ExpStream(rng_att, traffic.lambda2)

    params = controller.initial_params(rng_la)
    state = BacklogState(params, config.hold_mode, traffic.mu, rng_life)

    trace = event_trace
    REG, ATT = RequestClass.REGULAR, RequestClass.ATTACK

    def emit(t: float, kind: str, cls: str) -> None:
        p = state.params
        trace.write(f"{t!r}\t{kind}\t{cls}\t{state.n_regular + state.n_attack}"
                    f"\t{p.m}\t{p.h!r}\n")

    total = config.total_requests
    wsize = config.window_size
    n_windows = total // wsize
    windows: list[WindowMetrics] = []
    trajectory: list[tuple[int, DefenseParams]] = [(0, params)]
    win_start = state.snapshot()

    next_reg = reg_stream.draw()
    next_att = att_stream.draw()
    arrivals_done = 0
    horizon = 0.0

    while arrivals_done < total:
        if next_reg <= next_att:
            t_arr, cls = next_reg, REG
        else:
            t_arr, cls = next_att, ATT
        # same-time tie: departures run before the arrival
        while (entry := state.pop_due(t_arr)) is not None:
            state.advance_to(entry.dep)
            state.depart(entry)
            if trace:
                emit(entry.dep, entry.cause, entry.cls.value)
        state.advance_to(t_arr)
        if cls is REG:
            next_reg = t_arr + reg_stream.draw()
        else:
            next_att = t_arr + att_stream.draw()
        admitted = state.admit_or_block(cls, t_arr)
        if trace:
            emit(t_arr, EV_ADMIT if admitted else EV_BLOCK, cls.value)
        arrivals_done += 1
        horizon = t_arr

        if arrivals_done % wsize == 0 and len(windows) < n_windows:
            end = state.snapshot()
            duration = end[8] - win_start[8]
            wm = finalize_window(
                arrivals_regular=end[0] - win_start[0],
                arrivals_attack=end[1] - win_start[1],
                blocked_regular=end[2] - win_start[2],
                blocked_attack=end[3] - win_start[3],
                completed=end[4] - win_start[4],
                legit_expired=end[5] - win_start[5],
                norm_integral_regular=end[6] - win_start[6],
                norm_integral_attack=end[7] - win_start[7],
                duration=duration,
                epsilon_floor=config.epsilon_floor,
            )
            windows.append(wm)
            win_start = end
            new_params = controller.on_window_end(wm, rng_la)
            evictions = state.apply_defense_params(new_params, t_arr)
            if trace and (new_params != params or evictions.regular or evictions.attack):
                emit(t_arr, EV_PARAMS, "-")
            params = new_params
            if len(windows) < n_windows:
                trajectory.append((len(windows), params))

    totals = RunTotals()
    for cls in RequestClass:
        totals.arrivals[cls] = state.arrivals[cls]
        totals.admitted[cls] = state.admitted[cls]
        totals.blocked[cls] = state.blocked[cls]
    totals.residents_at_drain[REG] = state.n_regular
    totals.residents_at_drain[ATT] = state.n_attack

    # drain all residents after the last arrival
    while (entry := state.pop_due(_INF)) is not None:
        state.advance_to(entry.dep)
        state.depart(entry)
        if trace:
            emit(entry.dep, entry.cause, entry.cls.value)
    for cls in RequestClass:
        totals.completed[cls] = state.completed[cls]
        totals.expired[cls] = state.expired[cls]
    # everything drained: the residents term of the audit is now zero
    totals.residents_at_drain = {cls: 0 for cls in RequestClass}
    _audit(state, totals)

    return SimReport(
        windows=windows,
        param_trajectory=trajectory,
        cumulative=cumulative_metrics(windows, config.epsilon_floor),
        horizon=horizon,
        seed_echo=seed,
        totals=totals,
    )
