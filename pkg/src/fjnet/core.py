"""Core network data types: stochastic and substochastic matrices,
susceptibility profiles, deficiency calculus, and the augmented
leader-following form of a prejudiced-agent model.

All types are immutable after construction (arrays are marked read-only)
and every operation here is a pure function, so instances can be shared
freely across threads.
"""

import numpy as np

from .errors import DimensionMismatch, InvalidParams, NegativeEntry, RowSumViolation

# Default tolerance on row sums. Matrices read from files carry rounding,
# so exact stochasticity cannot be demanded; nothing is ever renormalized
# silently (see normalize_rows).
ROW_SUM_TOL = 1e-9


def _square(entries) -> np.ndarray:
    arr = np.array(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParams("matrix entries must be finite")
    return arr


def _check_nonnegative(arr: np.ndarray) -> None:
    if np.all(arr >= 0.0):
        return
    i, j = np.argwhere(arr < 0.0)[0]
    raise NegativeEntry(int(i), int(j), float(arr[i, j]))


class InfluenceMatrix:
    """Row-stochastic matrix of interpersonal influence weights.

    Entry (i, j) is the weight agent i assigns to agent j's opinion
    ("i listens to j"). Entries must be nonnegative and every row must sum
    to one within `tol`. Rows that fail are rejected, never repaired.
    """

    __slots__ = ("entries",)

    def __init__(self, entries, tol: float = ROW_SUM_TOL):
        arr = _square(entries)
        _check_nonnegative(arr)
        sums = arr.sum(axis=1)
        bad = np.abs(sums - 1.0) > tol
        if bad.any():
            i = int(np.argmax(bad))
            raise RowSumViolation(i, float(sums[i]))
        arr.setflags(write=False)
        self.entries = arr

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"InfluenceMatrix(n={self.n})"


class SubstochasticMatrix:
    """Nonnegative matrix whose row sums do not exceed one (within `tol`)."""

    __slots__ = ("entries",)

    def __init__(self, entries, tol: float = ROW_SUM_TOL):
        arr = _square(entries)
        _check_nonnegative(arr)
        sums = arr.sum(axis=1)
        bad = sums > 1.0 + tol
        if bad.any():
            i = int(np.argmax(bad))
            raise RowSumViolation(i, float(sums[i]))
        arr.setflags(write=False)
        self.entries = arr

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"SubstochasticMatrix(n={self.n})"


class SusceptibilityProfile:
    """Per-agent susceptibility to interpersonal influence, in [0, 1].

    A value of 0 pins the agent to its prejudice; a value of 1 makes it a
    pure averager with no attachment to the prejudice.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise DimensionMismatch(f"expected a nonempty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParams("susceptibilities must be finite")
        if (arr < 0.0).any() or (arr > 1.0).any():
            i = int(np.argmax((arr < 0.0) | (arr > 1.0)))
            raise InvalidParams(f"susceptibility {arr[i]!r} at index {i} is outside [0, 1]")
        arr.setflags(write=False)
        self.values = arr

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"SusceptibilityProfile(n={self.n})"


class FJModel:
    """Stationary opinion-formation model.

    Bundles the influence matrix W, the susceptibility profile and the
    constant prejudice vector u of the update law

        x(k+1) = diag(lambda) W x(k) + (I - diag(lambda)) u
    """

    __slots__ = ("influence", "profile", "prejudice")

    def __init__(self, influence: InfluenceMatrix, profile: SusceptibilityProfile, prejudice):
        u = np.array(prejudice, dtype=float)
        if u.ndim != 1:
            raise DimensionMismatch(f"prejudice must be a vector, got shape {u.shape}")
        if not (influence.n == profile.n == u.shape[0]):
            raise DimensionMismatch(
                f"sizes disagree: W is {influence.n}, profile is {profile.n}, u is {u.shape[0]}"
            )
        if not np.all(np.isfinite(u)):
            raise InvalidParams("prejudices must be finite")
        u.setflags(write=False)
        self.influence = influence
        self.profile = profile
        self.prejudice = u

    @property
    def n(self) -> int:
        return self.influence.n

    def system_matrix(self) -> SubstochasticMatrix:
        return system_matrix(self.profile, self.influence)

    def augmented(self) -> np.ndarray:
        return augmented_matrix(self.profile, self.influence)

    def is_nondegenerate(self) -> bool:
        """True when self-weight one coincides exactly with susceptibility zero.

        An agent with its entire influence row on itself keeps a constant
        opinion regardless of susceptibility, so well-posed models tie the
        two degeneracies together. Checked on demand, never enforced.
        """
        w_diag = np.diag(self.influence.entries)
        return bool(np.all((w_diag == 1.0) == (self.profile.values == 0.0)))

    def satisfies_coupling(self) -> bool:
        """True when every self-weight equals one minus the susceptibility.

        A historical modeling convention, stronger than is_nondegenerate();
        offered as an optional predicate only.
        """
        return bool(np.all(np.diag(self.influence.entries) == 1.0 - self.profile.values))

    def __repr__(self) -> str:
        return f"FJModel(n={self.n})"


def validate_stochastic(entries, tol: float = ROW_SUM_TOL) -> InfluenceMatrix:
    """Wrap a raw matrix as an InfluenceMatrix, rejecting invalid input.

    Raises NegativeEntry or RowSumViolation; rows are never renormalized.
    """
    return InfluenceMatrix(entries, tol=tol)


def validate_substochastic(entries, tol: float = ROW_SUM_TOL) -> SubstochasticMatrix:
    """Wrap a raw matrix as a SubstochasticMatrix, rejecting invalid input."""
    return SubstochasticMatrix(entries, tol=tol)


def normalize_rows(entries) -> np.ndarray:
    """Divide each row by its sum. Explicit utility, applied only on request.

    Raises RowSumViolation for rows whose sum is not strictly positive.
    """
    arr = _square(entries)
    sums = arr.sum(axis=1)
    bad = sums <= 0.0
    if bad.any():
        i = int(np.argmax(bad))
        raise RowSumViolation(i, float(sums[i]))
    return arr / sums[:, None]


def system_matrix(profile: SusceptibilityProfile, influence: InfluenceMatrix) -> SubstochasticMatrix:
    """The coupled update matrix diag(lambda) @ W; always substochastic."""
    if profile.n != influence.n:
        raise DimensionMismatch(f"profile is {profile.n}, W is {influence.n}")
    return SubstochasticMatrix(profile.values[:, None] * influence.entries)


def deficiency(a: SubstochasticMatrix) -> np.ndarray:
    """Per-row influence mass missing from one: 1 - row sum.

    Nonnegative (up to the row-sum tolerance) for substochastic input.
    """
    return 1.0 - a.entries.sum(axis=1)


def deficiency_of_product(a: SubstochasticMatrix, b: SubstochasticMatrix) -> np.ndarray:
    """Deficiency of the product a @ b without forming the product.

    Uses the exact identity def(AB) = def(A) + A def(B), which also shows
    that substochastic matrices are closed under multiplication.
    """
    if a.n != b.n:
        raise DimensionMismatch(f"sizes disagree: {a.n} vs {b.n}")
    return deficiency(a) + a.entries @ deficiency(b)


def decompose_substochastic(a: SubstochasticMatrix) -> tuple[SusceptibilityProfile, InfluenceMatrix]:
    """Split a substochastic matrix into susceptibilities and a stochastic part.

    Row i gets susceptibility equal to its sum; positive rows are rescaled
    to sum one, zero rows become a self-loop. Rescaling by the true row sum
    makes diag(lambda) @ W reproduce the input to rounding accuracy whenever
    the input rows genuinely sum to at most one.
    """
    sums = a.entries.sum(axis=1)
    lam = np.minimum(sums, 1.0)
    n = a.n
    w = np.zeros((n, n))
    pos = sums > 0.0
    w[pos] = a.entries[pos] / sums[pos, None]
    for i in np.flatnonzero(~pos):
        w[i, i] = 1.0
    return SusceptibilityProfile(lam), InfluenceMatrix(w)


def augmented_matrix(profile: SusceptibilityProfile, influence: InfluenceMatrix) -> np.ndarray:
    """Row-stochastic matrix of the model extended by a static anchor agent.

    The anchor (last index) holds the common prejudice; each agent feeds on
    it with weight 1 - lambda_i, turning stability of the original model
    into a leader-following consensus question.
    """
    if profile.n != influence.n:
        raise DimensionMismatch(f"profile is {profile.n}, W is {influence.n}")
    n = influence.n
    lam = profile.values
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = lam[:, None] * influence.entries
    out[:n, n] = 1.0 - lam
    out[n, n] = 1.0
    return out
