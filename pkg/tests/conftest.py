import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polyprof.geometry import HalfspaceSystem
from polyprof.network import Layer, NetworkSpec

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def one_layer_net(W, b) -> NetworkSpec:
    W = np.asarray(W, dtype=float)
    m = W.shape[0]
    return NetworkSpec(W.shape[1], (Layer(W, np.asarray(b, float), "relu"), Layer(np.ones((1, m)), np.zeros(1), "linear")))


def zero_net(d: int, hidden: int = 3, bias: float = 0.01) -> NetworkSpec:
    return NetworkSpec(
        d,
        (Layer(np.zeros((hidden, d)), np.full(hidden, bias), "relu"), Layer(np.zeros((1, hidden)), np.zeros(1), "linear")),
    )


def cube(lo: float, hi: float, d: int) -> HalfspaceSystem:
    eye = np.eye(d)
    return HalfspaceSystem(np.vstack([eye, -eye]), np.concatenate([np.full(d, -hi), np.full(d, lo)]))


def brute_vertices(h: HalfspaceSystem, tol: float = 1e-8) -> np.ndarray:
    """Every feasible intersection of d rows; an oracle independent of the library's enumeration."""
    A, b = h.normals, h.offsets
    d = h.dim
    pts = []
    for rows in itertools.combinations(range(h.n_rows), d):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, -b[list(rows)])
        if np.all(A @ x + b <= tol * max(1.0, np.abs(x).max())):
            if not any(np.linalg.norm(x - p) < 1e-7 for p in pts):
                pts.append(x)
    return np.array(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One line per acceptance criterion, filled by test_acceptance.py and echoed
# at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
