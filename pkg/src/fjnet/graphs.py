"""Threshold-walk reachability, prejudiced-agent sets, and membership
certificates for the stationary and chained influence classes."""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import InfluenceMatrix, SusceptibilityProfile
from .errors import DimensionMismatch, InvalidDelta, InvalidParams

# Distance sentinel for unreachable nodes; never a large finite number.
INFINITE = float("inf")


def prejudiced_set(profile: SusceptibilityProfile) -> frozenset[int]:
    """Agents whose susceptibility is strictly below one (exact comparison)."""
    return frozenset(np.flatnonzero(profile.values < 1.0).tolist())


def delta_prejudiced_set(profile: SusceptibilityProfile, delta: float) -> frozenset[int]:
    """Agents with susceptibility at most 1 - delta (closed, exact comparison).

    Comparisons are exact on purpose: delta is the caller's choice, and any
    fuzz here would break the monotonicity of the sets in delta.
    """
    if delta <= 0.0:
        raise InvalidDelta(f"delta must be positive, got {delta!r}")
    return frozenset(np.flatnonzero(profile.values <= 1.0 - delta).tolist())


@dataclass(frozen=True, eq=False)
class EpsWalkDistances:
    """Hop counts of shortest threshold walks into a target set.

    dist[i] is 0 on the set itself and INFINITE where no admissible walk
    exists; stored as floats so the sentinel is representable.
    """

    eps: float
    target_set: frozenset
    dist: np.ndarray


def eps_walk_distance(influence: InfluenceMatrix, eps: float, targets) -> EpsWalkDistances:
    """Shortest-walk lengths from every node into `targets` over heavy arcs.

    An arc i -> j exists when entry (i, j) >= eps. The search runs backward
    from the target set, so dist[i] counts the arcs of the shortest walk
    leaving i and ending inside the set. An empty target set yields all
    INFINITE.
    """
    if eps <= 0.0:
        raise InvalidParams(f"eps must be positive, got {eps!r}")
    n = influence.n
    targets = frozenset(int(i) for i in targets)
    for i in targets:
        if not 0 <= i < n:
            raise InvalidParams(f"target index {i} out of range for n={n}")
    dist = np.full(n, INFINITE)
    queue = deque(sorted(targets))
    for i in queue:
        dist[i] = 0.0
    heavy = influence.entries >= eps
    while queue:
        j = queue.popleft()
        for i in np.flatnonzero(heavy[:, j]):
            if dist[i] == INFINITE:
                dist[i] = dist[j] + 1.0
                queue.append(int(i))
    dist.setflags(write=False)
    return EpsWalkDistances(eps=float(eps), target_set=targets, dist=dist)


def fj_class_min_s(
    profile: SusceptibilityProfile, influence: InfluenceMatrix, delta: float, eps: float
) -> int | None:
    """Smallest s such that every agent is within s threshold hops of the
    delta-strongly-prejudiced set; None when some agent has no such walk
    (the model is in no class with these delta, eps)."""
    targets = delta_prejudiced_set(profile, delta)
    worst = float(eps_walk_distance(influence, eps, targets).dist.max())
    return None if worst == INFINITE else int(worst)


def natural_params(
    profile: SusceptibilityProfile, influence: InfluenceMatrix
) -> tuple[float, float] | None:
    """Built-in class parameters of a model: the smallest positive influence
    weight and the weakest prejudice margin over the prejudiced set.

    Returns None when no agent is prejudiced or the matrix has no positive
    entry (the latter cannot happen for a stochastic matrix).
    """
    s = prejudiced_set(profile)
    positive = influence.entries[influence.entries > 0.0]
    if not s or positive.size == 0:
        return None
    eps0 = float(positive.min())
    lam_max = float(profile.values[sorted(s)].max())
    delta0 = 1.0 - lam_max
    # 1 - (1 - x) can round below x, which would spuriously drop the
    # maximizing agent from the delta0-strong set; nudge delta0 down until
    # the exact threshold comparison recovers the full prejudiced set.
    while 1.0 - delta0 < lam_max:
        delta0 = float(np.nextafter(delta0, 0.0))
    return eps0, delta0


@dataclass(frozen=True)
class ClassParams:
    """Parameters (delta, eps, s) of an influence class."""

    delta: float
    eps: float
    s: int

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise InvalidParams(f"delta must be in (0, 1], got {self.delta!r}")
        if not 0.0 < self.eps <= 1.0:
            raise InvalidParams(f"eps must be in (0, 1], got {self.eps!r}")
        if int(self.s) != self.s or self.s < 0:
            raise InvalidParams(f"s must be a nonnegative integer, got {self.s!r}")


@dataclass(frozen=True)
class CFJCertificate:
    """Trace of the chain-class recursion over a sequence of model pairs.

    j_sets[k] collects the agents that are strongly prejudiced at step k or
    send a heavy arc into j_sets[k-1]; membership means the last set covers
    every agent. The trace is kept for reporting.
    """

    params: ClassParams
    j_sets: tuple
    member: bool
    n: int


def _check_pair(pair, n: int | None):
    profile, influence = pair
    if profile.n != influence.n:
        raise DimensionMismatch(f"pair sizes disagree: {profile.n} vs {influence.n}")
    if n is not None and influence.n != n:
        raise DimensionMismatch(f"sequence mixes sizes {n} and {influence.n}")
    return profile, influence


def cfj_membership(sequence, delta: float, eps: float) -> CFJCertificate:
    """Chain-class certificate for a sequence of (profile, influence) pairs.

    Element k of the sequence supplies the step-k matrices of the recursion,
    in chronological order. The marked set is NOT forced to grow: an agent
    stays marked only by being strongly prejudiced now or by sending a heavy
    arc into the previously marked set.
    """
    sequence = list(sequence)
    if not sequence:
        raise InvalidParams("sequence must be nonempty")
    params = ClassParams(delta, eps, len(sequence) - 1)
    profile0, influence0 = _check_pair(sequence[0], None)
    n = influence0.n
    current = delta_prejudiced_set(profile0, delta)
    j_sets = [current]
    for pair in sequence[1:]:
        profile, influence = _check_pair(pair, n)
        base = delta_prejudiced_set(profile, delta)
        idx = sorted(current)
        if idx:
            heavy = influence.entries[:, idx] >= eps
            reach = frozenset(np.flatnonzero(heavy.any(axis=1)).tolist())
        else:
            reach = frozenset()
        current = base | reach
        j_sets.append(current)
    return CFJCertificate(params=params, j_sets=tuple(j_sets), member=len(current) == n, n=n)
