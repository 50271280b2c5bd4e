"""Brute-force oracles on explicitly enumerated balls.

These recompute small-horizon quantities straight from the graph: the full
transition matrix on B(n) drives a vector DP whose origin entry is
p^(k)(o,o).  Nothing here shares code with the quotient-chain DP, which is
the point: agreement between the two certifies the lumping.

Evolving k <= n steps from the root never consults the rows of sphere-n
vertices, so the induced ball is exact for that horizon despite its missing
outward edges.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .errors import DomainError
from .kernel import transition_row
from .models import Ball, GraphModel, enumerate_ball

StateKey = tuple[int, int]


def ball_transition_matrix(model: GraphModel, lam: float, ball: Ball) -> sparse.csr_matrix:
    """Kernel rows for every vertex strictly inside the ball.

    Sphere-``radius`` vertices get zero rows; they are never applied when
    the horizon is at most the radius.
    """
    rows, cols, data = [], [], []
    for i, v in enumerate(ball.vertices):
        if len(v) >= ball.radius:
            continue
        for target, p in transition_row(model, lam, v).entries:
            rows.append(i)
            cols.append(ball.index[target])
            data.append(p)
    n = ball.size
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def ball_p_series(model: GraphModel, lam: float, n: int, cap: int = 10**6) -> np.ndarray:
    """Exact p^(k)(o,o), k = 0..n, by vector iteration on B(n)."""
    if n < 0:
        raise DomainError(f"horizon must be >= 0, got {n}")
    ball = enumerate_ball(model, n, cap=cap)
    kernel = ball_transition_matrix(model, lam, ball)
    v = np.zeros(ball.size)
    v[0] = 1.0
    out = np.zeros(n + 1)
    out[0] = 1.0
    for k in range(1, n + 1):
        v = kernel.T @ v
        out[k] = v[0]
    return out


def ball_f_series(model: GraphModel, lam: float, n: int, cap: int = 10**6) -> np.ndarray:
    """Exact first-return probabilities f^(k)(o,o), k = 0..n, on B(n)."""
    if n < 0:
        raise DomainError(f"horizon must be >= 0, got {n}")
    ball = enumerate_ball(model, n, cap=cap)
    kernel = ball_transition_matrix(model, lam, ball)
    v = np.zeros(ball.size)
    v[0] = 1.0
    out = np.zeros(n + 1)
    for k in range(1, n + 1):
        v = kernel.T @ v
        out[k] = v[0]
        v[0] = 0.0
    return out


def ball_lumped_distribution(
    model: GraphModel, lam: float, n: int, cap: int = 10**6
) -> dict[StateKey, float]:
    """Distribution of (level, type) after exactly n steps, from the ball DP.

    Type is the factor index of the last letter (0 at the root, 0 for all
    tree vertices).
    """
    ball = enumerate_ball(model, n, cap=cap)
    kernel = ball_transition_matrix(model, lam, ball)
    v = np.zeros(ball.size)
    v[0] = 1.0
    for _ in range(n):
        v = kernel.T @ v
    dist: dict[StateKey, float] = {}
    for i, addr in enumerate(ball.vertices):
        if v[i] == 0.0:
            continue
        key = (len(addr), addr.factor)
        dist[key] = dist.get(key, 0.0) + float(v[i])
    return dist
