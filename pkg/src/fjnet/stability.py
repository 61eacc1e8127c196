"""Schur-stability decisions, spectral-radius computation and bounds, and
sufficient stability certificates for time-varying schedules.

Certificates only ever answer STABLE or UNKNOWN: the underlying conditions
are sufficient, never necessary, so instability evidence must come from
simulation instead.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import SubstochasticMatrix, augmented_matrix, system_matrix
from .errors import (
    InvalidParams,
    NegativeEntry,
    NoConvergence,
    NonPeriodicSchedule,
    NotCFJMember,
)
from .graphs import (
    INFINITE,
    ClassParams,
    cfj_membership,
    eps_walk_distance,
    fj_class_min_s,
    natural_params,
    prejudiced_set,
)

log = logging.getLogger(__name__)

RHO_TOL = 1e-10
MAX_SQUARINGS = 200
BOUND_SLACK = 1e-8  # admissible numerical slack when comparing rho against a bound


def is_schur_stable(profile, influence) -> tuple[bool, np.ndarray]:
    """Graph criterion for spectral radius < 1 of the coupled system matrix.

    True iff every agent either is prejudiced or is influenced, through a
    walk of positive-weight arcs, by a prejudiced agent. Returns the verdict
    together with the per-agent walk distances used as a witness (all
    INFINITE when nobody is prejudiced).
    """
    prejudiced = prejudiced_set(profile)
    params = natural_params(profile, influence)
    if not prejudiced or params is None:
        dist = np.full(influence.n, INFINITE)
        dist.setflags(write=False)
        return False, dist
    eps0, _ = params
    dist = eps_walk_distance(influence, eps0, prejudiced).dist
    return bool(np.all(np.isfinite(dist))), dist


def _as_nonnegative_array(a) -> np.ndarray:
    if isinstance(a, SubstochasticMatrix):
        return a.entries
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidParams(f"expected a square matrix, got shape {arr.shape}")
    if (arr < 0.0).any():
        i, j = np.argwhere(arr < 0.0)[0]
        raise NegativeEntry(int(i), int(j), float(arr[i, j]))
    return arr


def _power_refine(arr: np.ndarray, estimate: float, tol: float, seed: int) -> float:
    """Try to sharpen a Gelfand estimate with plain power iteration.

    Started from a strictly positive vector; accepted only when the iterate
    settles to an eigenpair (tiny residual) that agrees with the squaring
    estimate. Periodic or otherwise non-settling matrices simply keep the
    squaring estimate.
    """
    n = arr.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 1.5, n)
    x /= x.max()
    for _ in range(200):
        y = arr @ x
        top = float(y.max())
        if top <= 0.0:
            # a positive start vector annihilated by a power: nilpotent matrix
            return 0.0
        lam = top  # x is normalized to max 1
        residual = float(np.max(np.abs(y - lam * x)))
        x = y / top
        if residual < 1e-12 * max(1.0, lam):
            if abs(lam - estimate) <= 10.0 * max(tol, 1e-15):
                return lam
            break
    return estimate


def spectral_radius(a, tol: float = RHO_TOL, max_iter: int = MAX_SQUARINGS, seed: int = 0) -> float:
    """Spectral radius of a nonnegative matrix.

    Repeated squaring with max-row-sum rescaling tracks the Gelfand limit
    ||A^(2^m)||^(1/2^m), stopping once successive estimates differ by less
    than tol; a short power-iteration refinement from a random positive
    start is applied when it settles. Robust to reducible and periodic
    matrices, which defeat naive power iteration.
    """
    arr = _as_nonnegative_array(a)
    norm = float(arr.sum(axis=1).max())
    if norm == 0.0:
        return 0.0
    b = arr / norm
    log_norm = math.log(norm)  # log of ||A^(2^m)||, currently m = 0
    weight = 1.0  # 2^m
    estimate = norm
    # Norm estimates of permutation-like matrices stall in runs (||A^k||
    # stays flat whenever 2^m mod cycle-length repeats a residue pattern),
    # so a bare successive-difference test can stop arbitrarily early. A
    # fixed floor of squarings drives the Gelfand error below any practical
    # tolerance (it decays like C / 2^m) before the difference test is
    # consulted at all.
    floor = min(max_iter, 50)
    for m in range(1, max_iter + 1):
        b = b @ b
        step_norm = float(b.sum(axis=1).max())
        if step_norm == 0.0:
            return 0.0  # some power vanished: nilpotent
        b = b / step_norm
        log_norm = 2.0 * log_norm + math.log(step_norm)
        weight *= 2.0
        new_estimate = math.exp(log_norm / weight)
        if m >= floor and abs(new_estimate - estimate) < 0.5 * tol:
            return _power_refine(arr, new_estimate, tol, seed)
        estimate = new_estimate
    raise NoConvergence(max_iter, f"spectral radius not settled to {tol!r} in {max_iter} squarings")


def rho_star(params: ClassParams) -> float:
    """Spectral-radius bound of a class: (1 - delta * eps**s) ** (1/(1+s))."""
    return (1.0 - params.delta * params.eps**params.s) ** (1.0 / (1.0 + params.s))


def corollary_bound(profile, influence) -> float | None:
    """Parameter-free radius bound from the model's own weights.

    Evaluates the class bound at the natural parameters with s = n - 1,
    which covers every Schur-stable model. None when the model is not
    stable by the graph criterion (or nobody is prejudiced).
    """
    stable, _ = is_schur_stable(profile, influence)
    nat = natural_params(profile, influence)
    if not stable or nat is None:
        return None
    eps0, delta0 = nat
    return rho_star(ClassParams(delta0, eps0, influence.n - 1))


@dataclass(frozen=True)
class ChainBound:
    """Row-sum check of a chained product against its class bound.

    deficiency_floor is the cruder per-row deficiency quantity
    delta * (1-delta)**s * eps**s, kept for diagnostics only; the binding
    statement is max_row_sum <= bound.
    """

    max_row_sum: float
    bound: float
    holds: bool
    deficiency_floor: float


def chain_row_sum_bound(sequence, delta: float, eps: float, slack: float = 1e-12) -> ChainBound:
    """Largest row sum of the chained system-matrix product versus the bound
    1 - delta * eps**s.

    The sequence must be a chain-class member (NotCFJMember otherwise). The
    product applies later steps on the left, matching the trajectory map.
    """
    sequence = list(sequence)
    cert = cfj_membership(sequence, delta, eps)
    if not cert.member:
        raise NotCFJMember(
            f"sequence is not in the chain class with delta={delta!r}, eps={eps!r}"
        )
    prod = np.eye(cert.n)
    for profile, influence in sequence:
        prod = (profile.values[:, None] * influence.entries) @ prod
    max_row_sum = float(prod.sum(axis=1).max())
    s = len(sequence) - 1
    bound = 1.0 - delta * eps**s
    return ChainBound(
        max_row_sum=max_row_sum,
        bound=bound,
        holds=max_row_sum <= bound + slack,
        deficiency_floor=delta * (1.0 - delta) ** s * eps**s,
    )


class CertificateKind(Enum):
    CFJ_SUBSEQUENCE = "cfj-subsequence"
    CONNECTIVITY_WINDOW = "connectivity-window"


class Verdict(Enum):
    STABLE = "stable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TVCertificate:
    """Outcome of a sufficient stability test on a periodic schedule."""

    kind: CertificateKind
    window_or_s: int
    params: dict
    verdict: Verdict
    details: dict = field(default_factory=dict)


def _period_pairs(schedule):
    period = list(schedule.period)
    if not period:
        raise NonPeriodicSchedule("schedule has no periodic tail to certify")
    return period


def tv_stability_certificate_cfj(schedule, delta: float, eps: float, s: int) -> TVCertificate:
    """Certify a periodic schedule by finding one chain-class window.

    A window of s+1 consecutive steps inside the periodic tail (wrap-around
    included) that is a chain-class member recurs infinitely often, which is
    sufficient for asymptotic stability. UNKNOWN otherwise; the first failing
    window's trace is attached for diagnosis.
    """
    period = _period_pairs(schedule)
    if int(s) != s or s < 0:
        raise InvalidParams(f"s must be a nonnegative integer, got {s!r}")
    s = int(s)
    p = len(period)
    params = {"delta": delta, "eps": eps, "s": s}
    first_failing = None
    for start in range(p):
        window = [period[(start + i) % p] for i in range(s + 1)]
        cert = cfj_membership(window, delta, eps)
        if cert.member:
            return TVCertificate(
                kind=CertificateKind.CFJ_SUBSEQUENCE,
                window_or_s=s,
                params=params,
                verdict=Verdict.STABLE,
                details={"window_start": start, "j_sets": cert.j_sets},
            )
        if first_failing is None:
            first_failing = (start, cert)
    start, cert = first_failing
    return TVCertificate(
        kind=CertificateKind.CFJ_SUBSEQUENCE,
        window_or_s=s,
        params=params,
        verdict=Verdict.UNKNOWN,
        details={"first_failing_window": start, "j_sets": cert.j_sets},
    )


def _connected_to_anchor(union: np.ndarray) -> np.ndarray:
    """Nodes with a directed walk to the last node in the positive-entry graph."""
    m = union.shape[0]
    anchor = m - 1
    reached = np.zeros(m, dtype=bool)
    reached[anchor] = True
    queue = [anchor]
    positive = union > 0.0
    while queue:
        j = queue.pop()
        for i in np.flatnonzero(positive[:, j]):
            if not reached[i]:
                reached[i] = True
                queue.append(int(i))
    return reached


def tv_consensus_criterion(schedule, eps: float, window: int) -> TVCertificate:
    """Certify a periodic schedule through the augmented anchor network.

    Premise: every augmented matrix over the period has entries in
    {0} union [eps, 1] with diagonal at least eps. Then stability follows if,
    for every window start in the period, the union graph of `window`
    consecutive augmented matrices connects each node to the anchor by a
    walk. Any premise or connectivity failure yields UNKNOWN.
    """
    if eps <= 0.0:
        raise InvalidParams(f"eps must be positive, got {eps!r}")
    if int(window) != window or window < 1:
        raise InvalidParams(f"window must be a positive integer, got {window!r}")
    window = int(window)
    period = _period_pairs(schedule)
    params = {"eps": eps, "window": window}
    mats = [augmented_matrix(profile, influence) for profile, influence in period]
    for k, m in enumerate(mats):
        admissible = (m == 0.0) | ((m >= eps) & (m <= 1.0 + 1e-12))
        if not admissible.all():
            i, j = np.argwhere(~admissible)[0]
            return TVCertificate(
                kind=CertificateKind.CONNECTIVITY_WINDOW,
                window_or_s=window,
                params=params,
                verdict=Verdict.UNKNOWN,
                details={
                    "reason": "weight-premise",
                    "step": k,
                    "entry": (int(i), int(j)),
                    "value": float(m[i, j]),
                },
            )
        diag = np.diag(m)
        if (diag < eps).any():
            i = int(np.argmax(diag < eps))
            return TVCertificate(
                kind=CertificateKind.CONNECTIVITY_WINDOW,
                window_or_s=window,
                params=params,
                verdict=Verdict.UNKNOWN,
                details={
                    "reason": "diagonal-premise",
                    "step": k,
                    "entry": (i, i),
                    "value": float(diag[i]),
                },
            )
    p = len(mats)
    for start in range(p):
        union = sum(mats[(start + i) % p] for i in range(window))
        reached = _connected_to_anchor(union)
        if not reached.all():
            return TVCertificate(
                kind=CertificateKind.CONNECTIVITY_WINDOW,
                window_or_s=window,
                params=params,
                verdict=Verdict.UNKNOWN,
                details={
                    "reason": "connectivity",
                    "window_start": start,
                    "disconnected": np.flatnonzero(~reached).tolist(),
                },
            )
    return TVCertificate(
        kind=CertificateKind.CONNECTIVITY_WINDOW,
        window_or_s=window,
        params=params,
        verdict=Verdict.STABLE,
        details={"windows_checked": p},
    )


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Structured stability summary of a stationary model."""

    schur_stable: bool
    rho: float
    bound_params: ClassParams | None
    rho_star: float | None
    criterion_witness: np.ndarray


def stability_report(
    profile, influence, delta: float | None = None, eps: float | None = None, tol: float = RHO_TOL
) -> StabilityReport:
    """Full stationary analysis: graph verdict, radius, and class bound.

    delta and eps default to the model's natural parameters; the bound is
    omitted when the class is empty for the given parameters (or no agent
    is prejudiced).
    """
    stable, witness = is_schur_stable(profile, influence)
    rho = spectral_radius(system_matrix(profile, influence), tol=tol)
    nat = natural_params(profile, influence)
    d = delta if delta is not None else (nat[1] if nat else None)
    e = eps if eps is not None else (nat[0] if nat else None)
    bound_params = None
    bound_value = None
    if d is not None and e is not None:
        if not 0.0 < d <= 1.0:
            raise InvalidParams(f"delta must be in (0, 1], got {d!r}")
        if not 0.0 < e <= 1.0:
            raise InvalidParams(f"eps must be in (0, 1], got {e!r}")
        s = fj_class_min_s(profile, influence, d, e)
        if s is not None:
            bound_params = ClassParams(d, e, s)
            bound_value = rho_star(bound_params)
            log.debug("class bound: delta=%g eps=%g s=%d rho*=%.12g", d, e, s, bound_value)
    return StabilityReport(
        schur_stable=stable,
        rho=rho,
        bound_params=bound_params,
        rho_star=bound_value,
        criterion_witness=witness,
    )
