"""Closed-form references used to validate the event engine.

erlang_b gives the M/M/m/m blocking probability via the stable recursion.
two_class_loss solves the exact steady state of the two-class loss system
with exponential holding at per-entry rates rate1/rate2 and a shared
capacity m; by PASTA the blocked fraction equals the probability mass on
full states.  Both are only exact against the engine in its exponential
hold mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ORACLE_M = 64
RESIDUAL_TOL = 1e-10


def erlang_b(m: int, offered_load: float) -> float:
    """Blocking probability of an M/M/m/m loss system.

    Recursion: B(0) = 1, B(n) = a*B(n-1) / (n + a*B(n-1)).
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if offered_load < 0:
        raise ValueError("offered load must be non-negative")
    b = 1.0
    for n in range(1, m + 1):
        b = offered_load * b / (n + offered_load * b)
    return b


@dataclass(frozen=True)
class CtmcSolution:
    """Steady state over occupancy pairs (i regular, j attack), i + j <= m."""

    pi: dict  # (i, j) -> probability
    Ploss: float
    Pr: float
    Pa: float
    residual: float


def two_class_loss(m: int, lambda1: float, lambda2: float,
                   rate1: float, rate2: float) -> CtmcSolution:
    """Exact two-class loss-system steady state by dense linear solve.

    States are (i, j) with i + j <= m; class-1 arrivals at lambda1 move
    (i, j) -> (i+1, j), departures at i*rate1 move back, and symmetrically
    for class 2.  Pr and Pa are the mean occupancy fractions E[i]/m and
    E[j]/m; Ploss is the total mass where i + j = m.
    """
    if m > MAX_ORACLE_M:
        raise ValueError("oracle limited to small m")
    if m < 1:
        raise ValueError("m must be at least 1")
    if rate1 < 0 or rate2 < 0 or rate1 + rate2 <= 0:
        raise ValueError("departure rates must be non-negative, not both zero")
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("arrival rates must be non-negative")

    states = [(i, j) for i in range(m + 1) for j in range(m + 1 - i)]
    index = {s: n for n, s in enumerate(states)}
    n_states = len(states)
    Q = np.zeros((n_states, n_states))
    for (i, j), n in index.items():
        if i + j < m:
            if lambda1 > 0:
                Q[n, index[(i + 1, j)]] += lambda1
            if lambda2 > 0:
                Q[n, index[(i, j + 1)]] += lambda2
        if i > 0:
            Q[n, index[(i - 1, j)]] += i * rate1
        if j > 0:
            Q[n, index[(i, j - 1)]] += j * rate2
        Q[n, n] = -Q[n].sum()

    # pi Q = 0 with sum(pi) = 1: replace one balance equation by normalization
    A = Q.T.copy()
    A[-1, :] = 1.0
    rhs = np.zeros(n_states)
    rhs[-1] = 1.0
    pi = np.linalg.solve(A, rhs)
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    residual = float(np.abs(pi @ Q).max())
    if residual > RESIDUAL_TOL:
        raise ArithmeticError(f"steady-state residual {residual:g} too large")

    ploss = float(sum(pi[n] for (i, j), n in index.items() if i + j == m))
    pr = float(sum(pi[n] * i for (i, j), n in index.items()) / m)
    pa = float(sum(pi[n] * j for (i, j), n in index.items()) / m)
    return CtmcSolution(pi={s: float(pi[n]) for s, n in index.items()},
                        Ploss=ploss, Pr=pr, Pa=pa, residual=residual)
