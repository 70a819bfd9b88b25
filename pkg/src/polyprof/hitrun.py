"""Monte Carlo face detection by Hit-and-Run with coordinate directions.

From a strictly interior point, walk along a random axis; the first
inequality hit in each direction along the chord is a facet of the polytope.
Recording those rows over many chords gives a sound (never redundant) but
possibly incomplete face set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from polyprof.errors import InvalidInput, NotInterior, NumericalFailure
from polyprof.geometry import BoundingBox, HalfspaceSystem, chebyshev_center
from polyprof.network import NetworkSpec, forward_with_pattern, region_halfspaces

DEFAULT_CHECKPOINT = 1000
DEFAULT_MAX_ITERATIONS = 1_000_000
_RESYNC = 1000


@dataclass
class HitRunState:
    x: np.ndarray
    found: set[int] = field(default_factory=set)
    iterations: int = 0
    last_new: int = 0
    seed: int = 0


@dataclass(frozen=True)
class HitRunResult:
    found: frozenset[int]
    iterations: int
    n_rows: int
    rejected: int = 0

    @property
    def n_found(self) -> int:
        return len(self.found)


def hit_and_run_faces(
    h: HalfspaceSystem,
    x0=None,
    checkpoint: int = DEFAULT_CHECKPOINT,
    seed: int = 0,
    *,
    directions: str = "coordinate",
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    trace: list | None = None,
) -> HitRunResult:
    """Indices of inequalities hit first along random chords.

    Stops once ``checkpoint`` consecutive iterations add nothing new, or at
    ``max_iterations``.  ``x0=None`` starts from the Chebyshev center.
    ``directions="sphere"`` draws uniform unit directions instead of axes.
    """
    if checkpoint < 1:
        raise InvalidInput("checkpoint must be >= 1")
    if directions not in ("coordinate", "sphere"):
        raise InvalidInput(f"unknown direction mode {directions!r}")
    norms = h.row_norms
    live = np.flatnonzero(norms > 0)
    A = h.normals[live] / norms[live, None]
    b = h.offsets[live] / norms[live]
    if x0 is None:
        x0, _ = chebyshev_center(h)
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape[0] != h.dim:
        raise InvalidInput("start point has the wrong dimension")
    slack = -(A @ x + b)
    if h.trivially_empty() or np.any(slack <= 0):
        raise NotInterior("start point is not strictly inside the polytope")

    rng = np.random.default_rng(seed)
    AT = np.ascontiguousarray(A.T)
    d = h.dim
    tol = h.tol
    state = HitRunState(x=x, seed=seed)
    rejected = 0
    while state.iterations < max_iterations and state.iterations - state.last_new < checkpoint:
        state.iterations += 1
        if directions == "coordinate":
            axis = int(rng.integers(d))
            sign = 1.0 if rng.random() < 0.5 else -1.0
            av = sign * AT[axis]
        else:
            v = rng.normal(size=d)
            v /= np.linalg.norm(v)
            av = A @ v
        sigma = rng.random()
        moving = np.abs(av) > tol
        lam = np.full(av.shape, np.nan)
        lam[moving] = slack[moving] / av[moving]
        pos = moving & (av > 0)
        neg = moving & (av < 0)
        if not (np.any(pos) and np.any(neg)):
            rejected += 1
            continue
        i_plus = int(np.flatnonzero(pos)[np.argmin(lam[pos])])
        i_minus = int(np.flatnonzero(neg)[np.argmax(lam[neg])])
        lam_plus, lam_minus = lam[i_plus], lam[i_minus]
        for i in (live[i_plus], live[i_minus]):
            if int(i) not in state.found:
                state.found.add(int(i))
                state.last_new = state.iterations
        t = lam_minus + sigma * (lam_plus - lam_minus)
        new_slack = slack - t * av
        if np.min(new_slack) <= 0:
            rejected += 1
            continue
        if directions == "coordinate":
            state.x[axis] += sign * t
        else:
            state.x += t * v
        slack = new_slack
        if state.iterations % _RESYNC == 0:
            slack = -(A @ state.x + b)
            if np.min(slack) <= 0:
                raise NumericalFailure("hit-and-run walk left the polytope")
        if trace is not None:
            trace.append(state.x.copy())
    return HitRunResult(frozenset(state.found), state.iterations, h.n_rows, rejected)


def estimate_region_faces(
    net: NetworkSpec,
    x,
    box: BoundingBox,
    checkpoint: int = DEFAULT_CHECKPOINT,
    seed: int = 0,
    **kwargs,
) -> HitRunResult:
    """Hit-and-Run on the region containing ``x``; ``n_rows`` is N + 2d."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if np.any(np.abs(x) > box.half_width):
        raise InvalidInput("point lies outside the box")
    _, pattern, _ = forward_with_pattern(net, x)
    h = region_halfspaces(net, pattern, box)
    norms = h.row_norms
    live = norms > 0
    dist = -(h.residuals(x)[live]) / norms[live]
    start = x
    if h.trivially_empty() or np.min(dist) <= h.tol:
        start, _ = chebyshev_center(h)
    return hit_and_run_faces(h, start, checkpoint, seed, **kwargs)
