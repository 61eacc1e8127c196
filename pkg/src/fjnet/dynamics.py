"""Trajectory simulation for stationary and time-varying models, steady
states, consensus checks, and containment analysis."""

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import FJModel, InfluenceMatrix, SusceptibilityProfile
from .errors import (
    DimensionMismatch,
    InvalidParams,
    NotSchurStable,
    SingularSystem,
    TrajectoryTooShort,
)
from .graphs import prejudiced_set
from .stability import is_schur_stable

CONV_TOL = 1e-10
MAX_STEPS = 100_000
STORE_CAP = 10_000  # stored states before stride thinning kicks in
COND_WARNING = 1e12
PERIOD_SCAN = 64


class TVSchedule:
    """Step-indexed sequence of (profile, influence) pairs.

    A finite prefix followed by an optional period that repeats forever.
    An empty period makes the schedule purely finite, usable only up to
    len(prefix) steps.
    """

    __slots__ = ("prefix", "period")

    def __init__(self, prefix=(), period=()):
        prefix = tuple(prefix)
        period = tuple(period)
        if not prefix and not period:
            raise InvalidParams("schedule needs at least one step")
        n = None
        for profile, influence in (*prefix, *period):
            if not isinstance(profile, SusceptibilityProfile) or not isinstance(
                influence, InfluenceMatrix
            ):
                raise InvalidParams(
                    "schedule elements must be (SusceptibilityProfile, InfluenceMatrix) pairs"
                )
            if profile.n != influence.n:
                raise DimensionMismatch(f"pair sizes disagree: {profile.n} vs {influence.n}")
            if n is None:
                n = influence.n
            elif influence.n != n:
                raise DimensionMismatch(f"schedule mixes sizes {n} and {influence.n}")
        self.prefix = prefix
        self.period = period

    @classmethod
    def constant(cls, profile, influence) -> "TVSchedule":
        return cls(period=[(profile, influence)])

    @property
    def n(self) -> int:
        seq = self.prefix or self.period
        return seq[0][1].n

    @property
    def is_periodic(self) -> bool:
        return bool(self.period)

    @property
    def horizon(self) -> int | None:
        """Number of usable steps; None when the schedule repeats forever."""
        return None if self.period else len(self.prefix)

    def at(self, k: int):
        """The (profile, influence) pair driving step k."""
        if k < 0:
            raise IndexError(f"step index must be nonnegative, got {k}")
        if k < len(self.prefix):
            return self.prefix[k]
        if not self.period:
            raise IndexError(f"finite schedule exhausted at step {k} (has {len(self.prefix)})")
        return self.period[(k - len(self.prefix)) % len(self.period)]

    def __repr__(self) -> str:
        return f"TVSchedule(n={self.n}, prefix={len(self.prefix)}, period={len(self.period)})"


@dataclass(frozen=True, eq=False)
class OpinionTrajectory:
    """Recorded opinion states of a simulation run.

    states[r] is the opinion vector at step steps[r]; step 0 and the final
    step are always present. limit is the final state when the run stopped
    by convergence, None otherwise. detected_period reports an exactly
    periodic tail (within the convergence tolerance) of a non-convergent
    run, when one was found.
    """

    states: np.ndarray
    steps: np.ndarray
    converged: bool
    limit: np.ndarray | None
    detected_period: int | None
    steps_run: int

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def at(self, k: int) -> np.ndarray:
        idx = np.flatnonzero(self.steps == k)
        if idx.size == 0:
            raise KeyError(f"step {k} was not recorded (stride thinning?)")
        return self.states[int(idx[0])]


def step(profile, influence, prejudice, opinions) -> np.ndarray:
    """One update: blend the weighted neighbor average with the prejudice.

    Agents with susceptibility zero are reproduced exactly from their
    prejudice entry.
    """
    lam = profile.values
    u = np.asarray(prejudice, dtype=float)
    x = np.asarray(opinions, dtype=float)
    n = influence.n
    if profile.n != n or u.shape != (n,) or x.shape != (n,):
        raise DimensionMismatch("profile, matrix, prejudice and opinions must share one size")
    return _step(lam, influence.entries, u, x)


def _step(lam, w, u, x):
    return lam * (w @ x) + (1.0 - lam) * u


def _detect_period(tail, tol, max_period):
    """Smallest p such that the last two length-p blocks of `tail` agree
    within tol; None if no such p <= max_period exists."""
    size = len(tail)
    for p in range(1, max_period + 1):
        if 2 * p > size:
            return None
        if all(float(np.max(np.abs(tail[-1 - j] - tail[-1 - j - p]))) <= tol for j in range(p)):
            return p
    return None


def _run(pair_at, u, x0, steps, conv_tol, stride, period_scan):
    if stride is None:
        stride = 1 if steps + 1 <= STORE_CAP else -(-(steps + 1) // STORE_CAP)
    if stride < 1:
        raise InvalidParams(f"stride must be positive, got {stride!r}")
    x = np.array(x0, dtype=float)
    recorded = [x]
    ks = [0]
    tail = deque([x], maxlen=2 * period_scan + 2)
    converged = False
    k_done = 0
    for k in range(steps):
        lam, w = pair_at(k)
        x_next = _step(lam, w, u, x)
        delta = float(np.max(np.abs(x_next - x)))
        x = x_next
        k_done = k + 1
        tail.append(x)
        if k_done % stride == 0:
            recorded.append(x)
            ks.append(k_done)
        if delta < conv_tol:
            converged = True
            break
    if ks[-1] != k_done:
        recorded.append(x)
        ks.append(k_done)
    detected = None
    if not converged and period_scan > 0 and k_done >= 2:
        detected = _detect_period(list(tail), max(conv_tol, 0.0), period_scan)
    return OpinionTrajectory(
        states=np.array(recorded),
        steps=np.array(ks, dtype=int),
        converged=converged,
        limit=np.array(x) if converged else None,
        detected_period=detected,
        steps_run=k_done,
    )


def _check_vector(vec, n, name):
    arr = np.asarray(vec, dtype=float)
    if arr.shape != (n,):
        raise DimensionMismatch(f"{name} must have shape ({n},), got {arr.shape}")
    return arr


def simulate(
    model: FJModel,
    x0=None,
    max_steps: int = MAX_STEPS,
    conv_tol: float = CONV_TOL,
    stride: int | None = None,
    period_scan: int = PERIOD_SCAN,
) -> OpinionTrajectory:
    """Iterate the stationary update law until the opinions move less than
    conv_tol in the max norm, or the step budget runs out.

    x0 defaults to the prejudice vector (the classical initialization).
    Long runs are stride-thinned to roughly STORE_CAP stored states, first
    and last always retained; pass stride=1 to keep everything.
    Non-convergence is reported through the flags, never raised.
    """
    max_steps = int(max_steps)
    if max_steps < 0:
        raise InvalidParams(f"max_steps must be nonnegative, got {max_steps!r}")
    u = model.prejudice
    x0 = np.array(u) if x0 is None else _check_vector(x0, model.n, "x0")
    lam = model.profile.values
    w = model.influence.entries
    return _run(lambda k: (lam, w), u, x0, max_steps, conv_tol, stride, period_scan)


def tv_simulate(
    schedule: TVSchedule,
    x0,
    prejudice,
    steps: int,
    conv_tol: float = 0.0,
    stride: int | None = None,
    period_scan: int = PERIOD_SCAN,
) -> OpinionTrajectory:
    """Run the time-indexed update for the given number of steps.

    By default every step is executed (conv_tol=0 disables early stopping),
    so states[k] is exactly the solution after k updates from x0 under the
    schedule. A constant schedule reproduces simulate() step for step.
    """
    steps = int(steps)
    if steps < 0:
        raise InvalidParams(f"steps must be nonnegative, got {steps!r}")
    horizon = schedule.horizon
    if horizon is not None and steps > horizon:
        raise InvalidParams(f"finite schedule provides {horizon} steps, asked for {steps}")
    n = schedule.n
    u = _check_vector(prejudice, n, "prejudice")
    x0 = _check_vector(x0, n, "x0")
    pre = [(p.values, w.entries) for p, w in schedule.prefix]
    per = [(p.values, w.entries) for p, w in schedule.period]
    n_pre = len(pre)

    def pair_at(k):
        if k < n_pre:
            return pre[k]
        return per[(k - n_pre) % len(per)]

    return _run(pair_at, u, x0, steps, conv_tol, stride, period_scan)


def steady_state(model: FJModel, cond_warning: float = COND_WARNING) -> tuple[np.ndarray, np.ndarray]:
    """Limit opinions of a Schur-stable model and the prejudice-to-outcome map.

    Solves (I - LW) x = (I - L) u directly and returns x together with the
    row-stochastic matrix V mapping prejudices to final opinions. Note the
    orientation: a unit prejudice on agent j makes x the j-th COLUMN of V.
    A condition-number warning is emitted when the system is nearly
    singular (radius close to one).
    """
    stable, _ = is_schur_stable(model.profile, model.influence)
    if not stable:
        raise NotSchurStable("steady state requires a Schur-stable model")
    lam = model.profile.values
    n = model.n
    a = np.eye(n) - lam[:, None] * model.influence.entries
    try:
        v = np.linalg.solve(a, np.diag(1.0 - lam))
        x_inf = np.linalg.solve(a, (1.0 - lam) * model.prejudice)
    except np.linalg.LinAlgError as exc:  # unreachable for stable models
        raise SingularSystem(f"(I - LW) failed to factorize: {exc}") from exc
    try:
        cond = float(np.linalg.cond(a, 1))
    except np.linalg.LinAlgError:
        cond = float("inf")
    if cond > cond_warning:
        warnings.warn(
            f"steady-state system is ill-conditioned (cond ~ {cond:.3g}); "
            "results may lose accuracy",
            RuntimeWarning,
            stacklevel=2,
        )
    return x_inf, v


def consensus_check(model: FJModel, tol: float = 1e-9) -> tuple[bool, float | None]:
    """Whether the limit opinions agree, decided from the prejudices alone.

    For a stable model, consensus holds iff the prejudices coincide across
    the prejudiced set; the common value is then the consensus opinion.
    """
    stable, _ = is_schur_stable(model.profile, model.influence)
    if not stable:
        raise NotSchurStable("consensus criterion requires a Schur-stable model")
    idx = sorted(prejudiced_set(model.profile))
    values = model.prejudice[idx]
    if float(values.max() - values.min()) <= tol:
        return True, float(values.mean())
    return False, None


def containment_bounds(
    trajectory: OpinionTrajectory,
    prejudice,
    tol: float = 1e-9,
    tail_fraction: float = 0.1,
    min_tail: int = 50,
) -> tuple[bool, bool]:
    """Check the trajectory tail against the prejudice interval.

    Looks at the last max(min_tail, tail_fraction * recorded) states and
    returns whether they stay above min(u) - tol and below max(u) + tol,
    coordinate-wise. Stable schedules keep the tail inside; persistent
    excursions witness instability.
    """
    states = trajectory.states
    if states.shape[0] < min_tail:
        raise TrajectoryTooShort(
            f"need at least {min_tail} recorded states, have {states.shape[0]}"
        )
    u = np.asarray(prejudice, dtype=float)
    count = max(min_tail, int(round(tail_fraction * states.shape[0])))
    tail = states[-count:]
    lo = float(u.min())
    hi = float(u.max())
    liminf_ok = bool((tail >= lo - tol).all())
    limsup_ok = bool((tail <= hi + tol).all())
    return liminf_ok, limsup_ok
