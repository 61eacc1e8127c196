"""Bundled example networks and schedules, also exposed through the CLI
`generate` command."""

import numpy as np

from .core import FJModel, InfluenceMatrix, SusceptibilityProfile, normalize_rows
from .dynamics import TVSchedule
from .errors import InvalidParams


def cycle_network(n: int, delta: float, prejudice=None) -> FJModel:
    """Unit-weight directed cycle with a single weakly susceptible agent.

    Agent 0 listens to agent n-1 with susceptibility 1 - delta; every other
    agent copies its predecessor. The coupled matrix has spectral radius
    (1 - delta) ** (1/n), attained by the class bound, which makes this the
    standard tightness fixture.
    """
    if n < 1:
        raise InvalidParams(f"n must be positive, got {n!r}")
    if not 0.0 < delta <= 1.0:
        raise InvalidParams(f"delta must be in (0, 1], got {delta!r}")
    w = np.zeros((n, n))
    w[0, n - 1] = 1.0
    for i in range(1, n):
        w[i, i - 1] = 1.0
    lam = np.ones(n)
    lam[0] = 1.0 - delta
    u = np.zeros(n) if prejudice is None else prejudice
    return FJModel(InfluenceMatrix(w), SusceptibilityProfile(lam), u)


def example1_schedule() -> tuple[TVSchedule, np.ndarray, np.ndarray]:
    """Three agents, fixed susceptibilities diag(0, 1, 1), switching matrix.

    Both per-step coupled matrices are nilpotent (radius zero), yet the
    alternation preserves x[1] over every even step: per-step stability is
    not enough for a switching system. Returns (schedule, u, x0) with the
    canonical u = 0 and x0 = (0, 1, 0).
    """
    profile = SusceptibilityProfile([0.0, 1.0, 1.0])
    w_even = InfluenceMatrix([[1, 0, 0], [1, 0, 0], [0, 1, 0]])
    w_odd = InfluenceMatrix([[1, 0, 0], [0, 0, 1], [1, 0, 0]])
    schedule = TVSchedule(period=[(profile, w_even), (profile, w_odd)])
    return schedule, np.zeros(3), np.array([0.0, 1.0, 0.0])


def example2_schedule() -> tuple[TVSchedule, np.ndarray, np.ndarray]:
    """Two agents, fixed swap matrix, alternating total prejudice.

    The susceptibility alternates between diag(0, 1) and diag(1, 0); x[0]
    is preserved over even steps although each coupled matrix is nilpotent.
    Returns (schedule, u, x0) with u = 0 and x0 = (1, 0).
    """
    w = InfluenceMatrix([[0, 1], [1, 0]])
    p_even = SusceptibilityProfile([0.0, 1.0])
    p_odd = SusceptibilityProfile([1.0, 0.0])
    schedule = TVSchedule(period=[(p_even, w), (p_odd, w)])
    return schedule, np.zeros(2), np.array([1.0, 0.0])


def random_connected_network(
    n: int,
    seed: int,
    density: float = 0.35,
    prejudiced: int = 1,
    max_susceptible: float = 0.7,
) -> FJModel:
    """Strongly connected random network with at least one prejudiced agent.

    A random Hamiltonian cycle guarantees strong connectivity; extra arcs
    are added with the given density and rows are normalized explicitly.
    `prejudiced` agents get susceptibility at most max_susceptible, so the
    model is always Schur stable.
    """
    if n < 1:
        raise InvalidParams(f"n must be positive, got {n!r}")
    prejudiced = min(max(1, prejudiced), n)
    rng = np.random.default_rng(seed)
    raw = np.zeros((n, n))
    order = rng.permutation(n)
    for i in range(n):
        raw[order[i], order[(i + 1) % n]] = rng.uniform(0.2, 1.0)
    extra = rng.random((n, n)) < density
    raw[extra] += rng.uniform(0.05, 1.0, size=(n, n))[extra]
    w = InfluenceMatrix(normalize_rows(raw))
    lam = rng.uniform(0.0, 1.0, n)
    chosen = rng.choice(n, size=prejudiced, replace=False)
    lam[chosen] = rng.uniform(0.0, max_susceptible, prejudiced)
    u = rng.uniform(-1.0, 1.0, n)
    return FJModel(w, SusceptibilityProfile(lam), u)


def dwell_schedule(model_a: FJModel, model_b: FJModel, dwell: int) -> TVSchedule:
    """Periodic switching between two stationary models with a given dwell.

    With two stable models and a long dwell the opinions settle near one
    model's steady state, then migrate to the other's, oscillating forever;
    the dwell time controls how closely each steady state is approached.
    """
    if dwell < 1:
        raise InvalidParams(f"dwell must be positive, got {dwell!r}")
    pair_a = (model_a.profile, model_a.influence)
    pair_b = (model_b.profile, model_b.influence)
    return TVSchedule(period=[pair_a] * dwell + [pair_b] * dwell)
