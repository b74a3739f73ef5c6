"""Maximization over unit balls and phase tori.

All objectives maximized over a unit ball here are convex and positively
homogeneous, so the iteration ``x <- argmax_{B} <g(x), .>`` (``g`` a
supergradient) never decreases the objective and stays on the unit sphere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RESTARTS = 32
DEFAULT_PHASES = 16


@dataclass(frozen=True)
class BallMax:
    value: float
    argmax: np.ndarray
    restarts: int
    iterations: int


def random_unit_vectors(space, count: int, rng) -> np.ndarray:
    """``count`` random vectors normalized to the unit sphere of ``space``."""
    if space.is_complex:
        z = rng.normal(size=(count, space.dim)) + 1j * rng.normal(size=(count, space.dim))
    else:
        z = rng.normal(size=(count, space.dim))
    n = space.norm(z)
    return z / n[:, None]


def maximize_convex_on_ball(space, value_and_grad, rng, restarts=DEFAULT_RESTARTS,
                            starts=None, max_iter=500, rtol=1e-15) -> BallMax:
    """Multi-start support-point ascent for a convex function on ``B_E``.

    ``value_and_grad(z)`` returns the objective and a supergradient expressed
    as a functional ``g`` of ``space`` (``Re g(.)`` is the linearization).
    """
    pts = random_unit_vectors(space, restarts, rng)
    if starts is not None and len(starts):
        s = np.asarray(starts, dtype=space.dtype).reshape(-1, space.dim)
        ns = space.norm(s)
        s = s[ns > 0] / ns[ns > 0, None]
        pts = np.vstack([s, pts])
    best_v, best_z, total = -np.inf, pts[0], 0
    for z in pts:
        v, g = value_and_grad(z)
        for _ in range(max_iter):
            total += 1
            z_new = space.support_point(g)
            v_new, g_new = value_and_grad(z_new)
            if v_new <= v + rtol * (1.0 + abs(v)):
                if v_new > v:
                    z, v = z_new, v_new
                break
            z, v, g = z_new, v_new, g_new
        if v > best_v:
            best_v, best_z = v, z
    return BallMax(float(best_v), np.asarray(best_z), len(pts), total)


def maximize_on_torus(fn, m: int, rng, phases=DEFAULT_PHASES, top=4, min_step=1e-9,
                      samples=64):
    """Maximize ``fn(theta)`` over ``theta in [0, 2pi)^m``.

    ``fn`` is vectorized over leading axes.  Initialization takes the best
    points of a ``phases``-grid (or random samples once the grid is large),
    then runs coordinate pattern search with a halving step.
    Returns ``(value, theta)``.
    """
    if m == 0:
        th = np.zeros(0)
        return float(fn(th[None, :])[0]), th
    grid = 2 * np.pi * np.arange(phases) / phases
    if phases ** m <= 4096:
        cand = np.array(np.meshgrid(*([grid] * m), indexing="ij")).reshape(m, -1).T
    else:
        cand = rng.uniform(0, 2 * np.pi, size=(max(samples, 4096), m))
    vals = fn(cand)
    order = np.argsort(-vals)[:top]
    best_v, best_t = -np.inf, None
    for i in order:
        t = cand[i].copy()
        v = vals[i]
        step = 2 * np.pi / phases
        while step >= min_step:
            improved = False
            for j in range(m):
                trial = np.repeat(t[None, :], 2, axis=0)
                trial[0, j] += step
                trial[1, j] -= step
                tv = fn(trial)
                k = int(np.argmax(tv))
                if tv[k] > v:
                    t, v = trial[k], tv[k]
                    improved = True
            if not improved:
                step /= 2
        if v > best_v:
            best_v, best_t = v, np.mod(t, 2 * np.pi)
    return float(best_v), best_t
