"""Achievable-rate bounds and exact random-codebook error.

The central object is the per-(distribution, n, delta) error model: for every
source type it holds the exact type-class probability and the exact chance
that an i.i.d. output sequence lands jointly typical with a source sequence of
that type. Everything else (error curves, smallest adequate codebook size,
the closed-form rate bounds) is assembled from those two arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .distributions import (
    DistributionError,
    JointDistribution,
    as_fraction,
    info_profile,
)
from .gaussian import q_inverse
from .types import TypeVector, joint_cell_bounds, log2_factorials

__all__ = [
    "InfeasibleRateError",
    "PreconditionError",
    "BoundCondition",
    "BoundReport",
    "ErrorCurve",
    "CodebookErrorModel",
    "get_error_model",
    "clear_model_cache",
    "prob_typical_given_type",
    "expected_codebook_error",
    "error_floor",
    "error_curve",
    "optimal_random_codebook_rate",
    "gaussian_approx_rate",
    "exact_achievability_bound",
    "typicality_prob_bound_check",
    "rate_rounding",
]

NEG_INF = float("-inf")

# Hard cap on the number of source types an error model may enumerate.
MAX_MODEL_TYPES = 50_000_000


class InfeasibleRateError(RuntimeError):
    """No codebook size can reach the requested error level."""


class PreconditionError(ValueError):
    """A stated precondition of a bound evaluator is violated."""


def _log2_or_neg_inf(p: Fraction) -> float:
    if p == 0:
        return NEG_INF
    f = float(p)
    if f <= 0.0:
        raise DistributionError(f"probability {p} underflows double precision")
    return math.log2(f)


class CodebookErrorModel:
    """Exact per-type tables for one (distribution, blocklength, threshold).

    Attributes log2_lam and log2_pi are parallel arrays over all source types
    supported inside supp P_U: the log2 type-class probability under P_U, and
    the log2 probability that an independent i.i.d. P_V sequence is jointly
    typical with a source sequence of that type. Read-only after construction,
    safe to share across threads.
    """

    def __init__(self, dist: JointDistribution, n: int, delta):
        if n < 1:
            raise ValueError(f"blocklength must be positive, got {n}")
        self.dist = dist
        self.n = int(n)
        self.delta = as_fraction(delta)

        lo, hi = joint_cell_bounds(self.n, dist, self.delta)
        lgfact = log2_factorials(self.n)
        log2_pv = np.array([_log2_or_neg_inf(p) for p in dist.p_v_fractions])

        support = dist.support_u
        n_types = math.comb(self.n + len(support) - 1, len(support) - 1)
        if n_types > MAX_MODEL_TYPES:
            raise ValueError(
                f"alphabet too large for exact computation: {n_types} source types"
            )

        self._support = support
        self._support_pos = {i: pos for pos, i in enumerate(support)}
        self._s_tables = np.vstack(
            [kernels.row_logmass_table(self.n, lo[i], hi[i], log2_pv, lgfact) for i in support]
        )
        log2_pu = np.array([_log2_or_neg_inf(dist.p_u_fractions[i]) for i in support])
        self.log2_lam, self.log2_pi = kernels.type_sweep(
            self.n, log2_pu, self._s_tables, lgfact
        )

        lam = np.exp2(self.log2_lam)
        feasible = self.log2_pi > NEG_INF
        self._lam_feasible = lam[feasible]
        # Clamp fp jitter: a success probability is at most 1.
        self._log2_pi_feasible = np.minimum(self.log2_pi[feasible], 0.0)
        self._pi_feasible = np.exp2(self._log2_pi_feasible)
        # Complement form: exact 1.0 when no type admits a typical completion.
        self._floor = min(1.0, max(0.0, 1.0 - float(np.sum(self._lam_feasible))))

    def log2_success_of_type(self, counts) -> float:
        """log2 Pi for a source type given as counts over the full alphabet_u."""
        acc = 0.0
        for i, c in enumerate(counts):
            if i in self._support_pos:
                acc += self._s_tables[self._support_pos[i]][c]
            elif c > 0:
                # mass on a zero-probability source symbol: condition (ii) of
                # joint typicality can never hold
                return NEG_INF
        return acc

    def error_floor(self) -> float:
        """P[the source type admits no typical completion]: the limit of the
        expected error as the codebook grows."""
        return self._floor

    def expected_error(self, m: int) -> float:
        """Expected codebook error E[(1 - Pi)^m] over source types.

        Evaluated as 1 - sum lam * (1 - (1 - pi)^m) over the types with a
        typical completion, which is exact when none exists and stable for
        pi near 0 or 1 across the whole m range visited by bisection.
        """
        if m < 1:
            raise ValueError(f"codebook size must be >= 1, got {m}")
        if m.bit_length() <= 1023:
            with np.errstate(divide="ignore", invalid="ignore"):
                win = -np.expm1(float(m) * np.log1p(-self._pi_feasible))
        else:
            # m exceeds the float range; work with log2(m * pi) directly. In
            # this regime every pi is far below 2^-53, so (1-pi)^m = e^(-m pi)
            # to within a vanishing relative error.
            log2_mpi = math.log2(m) + self._log2_pi_feasible
            win = np.where(
                log2_mpi >= 50.0,
                1.0,
                -np.expm1(-np.exp2(np.minimum(log2_mpi, 50.0))),
            )
        value = 1.0 - float(np.sum(self._lam_feasible * win))
        return min(1.0, max(self._floor, value))


_model_cache: dict = {}


def get_error_model(dist: JointDistribution, n: int, delta) -> CodebookErrorModel:
    """Shared, cached error model for (dist, n, delta)."""
    key = (dist.digest, int(n), as_fraction(delta))
    model = _model_cache.get(key)
    if model is None:
        model = CodebookErrorModel(dist, n, delta)
        _model_cache[key] = model
    return model


def clear_model_cache() -> None:
    _model_cache.clear()


def prob_typical_given_type(t_u: TypeVector, dist: JointDistribution, delta) -> float:
    """Probability that an i.i.d. P_V sequence is jointly typical with a fixed
    source sequence of the given type. Zero when no typical completion exists."""
    if t_u.alphabet != dist.alphabet_u:
        raise ValueError("type alphabet does not match the distribution")
    model = get_error_model(dist, t_u.n, delta)
    l2 = model.log2_success_of_type(t_u.counts)
    if l2 == NEG_INF:
        return 0.0
    return float(np.exp2(min(l2, 0.0)))


def expected_codebook_error(n: int, m: int, dist: JointDistribution, delta) -> float:
    """Exact expected error of a random codebook with m codewords."""
    return get_error_model(dist, n, delta).expected_error(m)


def error_floor(n: int, dist: JointDistribution, delta) -> float:
    """Probability that the source type has no typical completion at all."""
    return get_error_model(dist, n, delta).error_floor()


@dataclass(frozen=True)
class ErrorCurve:
    """Expected error as a function of codebook size, with its large-m limit."""

    n: int
    delta: float
    points: tuple
    floor: float


def error_curve(n: int, dist: JointDistribution, delta, m_values) -> ErrorCurve:
    model = get_error_model(dist, n, delta)
    points = tuple((int(m), model.expected_error(int(m))) for m in sorted(m_values))
    return ErrorCurve(n=n, delta=float(delta), points=points, floor=model.error_floor())


def optimal_random_codebook_rate(
    n: int, dist: JointDistribution, delta, eps: float
) -> tuple[float, int]:
    """Smallest rate achieved by an average random codebook.

    Returns (rate, m_star) with m_star the least codebook size whose expected
    error is at most eps; rate = log2(m_star)/n. Raises InfeasibleRateError
    when the error floor already exceeds eps.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    model = get_error_model(dist, n, delta)
    floor = model.error_floor()
    if floor > eps:
        raise InfeasibleRateError(
            f"infeasible: error floor {floor:.6g} exceeds eps = {eps:.6g} at n = {n}"
        )
    if model.expected_error(1) <= eps:
        return 0.0, 1
    cap_log2 = n * (math.log2(len(dist.alphabet_v)) + 2.0)
    hi = 1
    while model.expected_error(hi) > eps:
        hi <<= 1
        if hi.bit_length() - 1 > cap_log2:
            raise RuntimeError(
                "codebook size search exceeded the 2^(n(log2|V|+2)) safety cap"
            )
    lo = hi >> 1  # error(lo) > eps from the doubling loop
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if model.expected_error(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return math.log2(hi) / n, hi


def gaussian_approx_rate(n: int, dist: JointDistribution, eps: float) -> float:
    """Second-order normal-approximation rate I + sqrt(V/n) Qinv(eps)."""
    profile = info_profile(dist)
    v = profile.coordination_variance
    if v == 0.0:
        return profile.mutual_information
    return profile.mutual_information + math.sqrt(v / n) * q_inverse(eps)


@dataclass(frozen=True)
class BoundCondition:
    name: str
    satisfied: bool
    threshold: float


@dataclass(frozen=True)
class BoundReport:
    """A rate bound with validity diagnostics.

    terms holds the four summands of the rate (mutual information, the
    polylog type-counting penalty, the 2/n rounding penalty, the dispersion
    term); rate is their sum whenever the bound is valid. q_argument records
    the adjusted tail level fed to the Gaussian quantile.
    """

    rate: float | None
    valid: bool
    terms: dict
    q_argument: float | None
    conditions: tuple

    def failed_conditions(self) -> tuple:
        return tuple(c for c in self.conditions if not c.satisfied)


def exact_achievability_bound(
    n: int,
    dist: JointDistribution,
    delta,
    eps: float,
    evaluate_invalid: bool = False,
) -> BoundReport:
    """Non-asymptotic upper bound on the optimal coordination rate.

    Checks the validity thresholds on n and eps, then evaluates
    I + 2(|U||V|+1) log2(n+1)/n + 2/n + sqrt(V/n) Qinv(eps - penalty),
    with the dispersion term dropped when V = 0. Invalid inputs yield
    valid=False with per-condition diagnostics instead of exceptions; pass
    evaluate_invalid=True to force evaluation of whatever terms are defined.
    """
    d = as_fraction(delta)
    profile = info_profile(dist)
    size_u = len(dist.alphabet_u)
    size_v = len(dist.alphabet_v)
    pi_u = dist.min_prob_u_fraction
    pi_v = dist.min_prob_v_fraction
    pi_uv = dist.min_prob_uv_fraction

    conditions = []
    delta_ok = 0 < d < 1
    conditions.append(BoundCondition("delta in (0,1)", delta_ok, float("nan")))
    eps_ok = 0.0 < eps < 1.0
    conditions.append(BoundCondition("eps in (0,1)", eps_ok, float("nan")))

    if delta_ok:
        thr_n_delta = 4 / (pi_u * pi_u * d)
        conditions.append(
            BoundCondition("n >= 4/(pi_u^2*delta)", Fraction(n) >= thr_n_delta, float(thr_n_delta))
        )
    else:
        conditions.append(BoundCondition("n >= 4/(pi_u^2*delta)", False, float("nan")))
    thr_n_uv = 2 / pi_uv
    conditions.append(BoundCondition("n >= 2/pi_uv", Fraction(n) >= thr_n_uv, float(thr_n_uv)))
    thr_n_prod = 2 / (pi_u * pi_v)
    conditions.append(
        BoundCondition("n >= 2/(pi_u*pi_v)", Fraction(n) >= thr_n_prod, float(thr_n_prod))
    )

    penalty = (2 * size_u + 1) * math.exp(
        -n * float(d) ** 2 * float(pi_u) ** 2 / 2.0
    ) + 1.0 / (2.0 * math.sqrt(n * float(pi_u)))
    conditions.append(
        BoundCondition("eps > tail penalty", eps_ok and delta_ok and eps > penalty, penalty)
    )

    valid = all(c.satisfied for c in conditions)

    terms = {
        "mutual_information": profile.mutual_information,
        "type_count_penalty": 2.0 * (size_u * size_v + 1) * math.log2(n + 1) / n,
        "rounding_penalty": 2.0 / n,
    }
    v = profile.coordination_variance
    q_argument = None
    rate = None
    if valid or evaluate_invalid:
        if v == 0.0:
            terms["dispersion"] = 0.0
            rate = sum(terms.values())
        else:
            arg = eps - penalty
            if 0.0 < arg < 1.0:
                q_argument = arg
                terms["dispersion"] = math.sqrt(v / n) * q_inverse(arg)
                rate = sum(terms.values())
    return BoundReport(
        rate=rate,
        valid=valid,
        terms=terms,
        q_argument=q_argument,
        conditions=tuple(conditions),
    )


def typicality_prob_bound_check(
    t_u: TypeVector, dist: JointDistribution, delta
) -> tuple[float, float, bool]:
    """Check that -log2 Pi(t_u) is at most the polylog-plus-divergence bound.

    Preconditions: the three blocklength thresholds of the exact bound, and
    t_u typical for P_U at threshold delta*pi_u/2. Returns (lhs, rhs, holds).
    """
    if t_u.alphabet != dist.alphabet_u:
        raise ValueError("type alphabet does not match the distribution")
    d = as_fraction(delta)
    if not 0 < d < 1:
        raise PreconditionError("precondition violated: delta not in (0,1)")
    n = t_u.n
    pi_u = dist.min_prob_u_fraction
    checks = (
        ("n >= 4/(pi_u^2*delta)", Fraction(n) >= 4 / (pi_u * pi_u * d)),
        ("n >= 2/pi_uv", Fraction(n) >= 2 / dist.min_prob_uv_fraction),
        ("n >= 2/(pi_u*pi_v)", Fraction(n) >= 2 / (pi_u * dist.min_prob_v_fraction)),
    )
    for name, ok in checks:
        if not ok:
            raise PreconditionError(f"precondition violated: {name}")
    delta_u = d * pi_u / 2
    for i, u in enumerate(dist.alphabet_u):
        c = t_u.counts[i]
        p = dist.p_u_fractions[i]
        if p == 0 and c > 0:
            raise PreconditionError(
                "precondition violated: t_u puts mass outside supp P_U"
            )
        if abs(Fraction(c) - n * p) > n * delta_u:
            raise PreconditionError(
                "precondition violated: t_u not typical at delta*pi_u/2"
            )

    model = get_error_model(dist, n, delta)
    lhs = -model.log2_success_of_type(t_u.counts)
    profile = info_profile(dist)
    rhs = 2.0 * len(dist.alphabet_u) * len(dist.alphabet_v) * math.log2(n + 1)
    for i, u in enumerate(dist.alphabet_u):
        if t_u.counts[i] > 0:
            rhs += t_u.counts[i] * profile.cond_divergence[u]
    return lhs, rhs, bool(lhs <= rhs)


def rate_rounding(r_star: float, n: int) -> tuple[int, float]:
    """Round a target rate to an integer codebook size m = ceil(2^(n r)).

    The realized rate log2(m)/n never exceeds r_star + 2/n. Exponents beyond
    the double-precision range raise OverflowError.
    """
    if r_star < 0:
        raise ValueError(f"rate must be nonnegative, got {r_star}")
    exponent = n * r_star
    if exponent > 1020:
        raise OverflowError(
            f"overflow: 2^(n*r) with exponent {exponent:.3g} exceeds the float range"
        )
    m = max(1, math.ceil(2.0**exponent))
    return m, math.log2(m) / n
