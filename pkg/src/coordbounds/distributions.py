"""Finite joint distributions and their single-letter information functionals.

Probabilities are ingested as exact rationals so that support membership and
normalization are decided exactly; every information quantity (densities,
divergences, variances) is computed on a double-precision rendering, in bits.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "DistributionError",
    "JointDistribution",
    "InfoProfile",
    "build_distribution",
    "information_density",
    "info_profile",
    "variance_decomposition_check",
    "third_moment_ratio",
    "load_distribution",
    "dump_distribution",
]


class DistributionError(ValueError):
    """Invalid distribution input: not normalized, negative mass, bad symbols."""


def as_fraction(value) -> Fraction:
    """Coerce ints, strings like '1/3', floats, and Fractions to an exact Fraction.

    Floats are converted to their exact binary value, so comparisons made with
    the result are deterministic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DistributionError(f"not a probability value: {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise DistributionError(f"cannot interpret {value!r} as an exact rational")


class JointDistribution:
    """A target joint distribution on the product of two finite ordered alphabets.

    Entries are exact Fractions summing to 1. Marginals, conditionals, supports
    and minimum nonzero probabilities are derived once at construction; the
    object is immutable afterwards and safe for concurrent reads.
    """

    def __init__(self, alphabet_u: Iterable, alphabet_v: Iterable, table: Mapping):
        self.alphabet_u = tuple(alphabet_u)
        self.alphabet_v = tuple(alphabet_v)
        if not self.alphabet_u or not self.alphabet_v:
            raise DistributionError("alphabets must be nonempty")
        if len(set(self.alphabet_u)) != len(self.alphabet_u):
            raise DistributionError("duplicate symbol in alphabet_u")
        if len(set(self.alphabet_v)) != len(self.alphabet_v):
            raise DistributionError("duplicate symbol in alphabet_v")
        self.u_index = {u: i for i, u in enumerate(self.alphabet_u)}
        self.v_index = {v: j for j, v in enumerate(self.alphabet_v)}

        grid = [[Fraction(0)] * len(self.alphabet_v) for _ in self.alphabet_u]
        for (u, v), value in table.items():
            if u not in self.u_index or v not in self.v_index:
                raise DistributionError(f"unknown symbol in entry ({u!r}, {v!r})")
            p = as_fraction(value)
            if p < 0:
                raise DistributionError(f"negative probability at ({u!r}, {v!r}): {p}")
            grid[self.u_index[u]][self.v_index[v]] += p
        total = sum(sum(row) for row in grid)
        if total != 1:
            raise DistributionError(f"not normalized: entries sum to {total}, expected 1")

        self.fractions = tuple(tuple(row) for row in grid)
        self.prob = np.array([[float(p) for p in row] for row in self.fractions])

        self.p_u_fractions = tuple(sum(row) for row in self.fractions)
        self.p_v_fractions = tuple(
            sum(self.fractions[i][j] for i in range(len(self.alphabet_u)))
            for j in range(len(self.alphabet_v))
        )
        self.p_u = np.array([float(p) for p in self.p_u_fractions])
        self.p_v = np.array([float(p) for p in self.p_v_fractions])

        self.support_u = tuple(i for i, p in enumerate(self.p_u_fractions) if p > 0)
        self.support_v = tuple(j for j, p in enumerate(self.p_v_fractions) if p > 0)
        self.support_pairs = tuple(
            (i, j)
            for i in range(len(self.alphabet_u))
            for j in range(len(self.alphabet_v))
            if self.fractions[i][j] > 0
        )

        # Conditional rows P_{V|u} on supp P_U, exact and float.
        self.cond_v_given_u_fractions = {}
        for i in self.support_u:
            row_mass = self.p_u_fractions[i]
            self.cond_v_given_u_fractions[i] = tuple(p / row_mass for p in self.fractions[i])

        self.min_prob_u = float(min(self.p_u_fractions[i] for i in self.support_u))
        self.min_prob_v = float(min(self.p_v_fractions[j] for j in self.support_v))
        self.min_prob_uv = float(min(self.fractions[i][j] for i, j in self.support_pairs))
        self.min_prob_u_fraction = min(self.p_u_fractions[i] for i in self.support_u)
        self.min_prob_v_fraction = min(self.p_v_fractions[j] for j in self.support_v)
        self.min_prob_uv_fraction = min(self.fractions[i][j] for i, j in self.support_pairs)

        digest = hashlib.sha256()
        digest.update(repr(self.alphabet_u).encode())
        digest.update(repr(self.alphabet_v).encode())
        digest.update(repr(self.fractions).encode())
        self.digest = digest.hexdigest()

        self._profile = None

    def frac(self, u, v) -> Fraction:
        return self.fractions[self.u_index[u]][self.v_index[v]]

    def in_support(self, u, v) -> bool:
        """Exact support test on the rational table."""
        return self.frac(u, v) > 0

    def cond_v_given_u(self, u) -> np.ndarray:
        """P_{V|u} as a float vector; u must carry positive marginal mass."""
        i = self.u_index[u]
        if i not in self.support_u:
            raise DistributionError(f"conditional undefined: P_U({u!r}) = 0")
        return np.array([float(p) for p in self.cond_v_given_u_fractions[i]])

    def __repr__(self):
        nz = len(self.support_pairs)
        return (
            f"JointDistribution({len(self.alphabet_u)}x{len(self.alphabet_v)} "
            f"alphabet, {nz} support cells)"
        )


@dataclass(frozen=True)
class InfoProfile:
    """Single-letter information quantities of a joint distribution, in bits.

    coordination_variance is the variance of the conditional expectation of the
    information density given the first coordinate; third_abs_moment is the
    third absolute central moment of the same random variable.
    """

    mutual_information: float
    cond_divergence: dict
    coordination_variance: float
    third_abs_moment: float
    min_prob_u: float
    min_prob_v: float
    min_prob_uv: float


def build_distribution(alphabet_u, alphabet_v, entries) -> JointDistribution:
    """Validate and construct a JointDistribution from ((u, v), rational) pairs."""
    table = {}
    for (u, v), value in entries:
        key = (u, v)
        if key in table:
            table[key] = as_fraction(table[key]) + as_fraction(value)
        else:
            table[key] = value
    return JointDistribution(alphabet_u, alphabet_v, table)


def information_density(dist: JointDistribution, u, v) -> float:
    """log2 P(u,v) / (P_U(u) P_V(v)), defined on the support only."""
    if u not in dist.u_index or v not in dist.v_index:
        raise DistributionError(f"unknown symbol ({u!r}, {v!r})")
    if not dist.in_support(u, v):
        raise DistributionError(f"outside support: P({u!r}, {v!r}) = 0")
    i, j = dist.u_index[u], dist.v_index[v]
    return math.log2(dist.prob[i, j]) - math.log2(dist.p_u[i]) - math.log2(dist.p_v[j])


def info_profile(dist: JointDistribution) -> InfoProfile:
    """Mutual information, conditional divergences, and the moments that drive
    the second-order term of the achievable rate. Cached on the distribution."""
    if dist._profile is not None:
        return dist._profile

    cond_div = {}
    for i in dist.support_u:
        u = dist.alphabet_u[i]
        d = 0.0
        for j in dist.support_v:
            if dist.fractions[i][j] == 0:
                continue
            # Exact rational conditional, rendered once: a product distribution
            # then yields bit-identical cond and P_V(v), hence an exact zero.
            cond = float(dist.cond_v_given_u_fractions[i][j])
            d += cond * (math.log2(cond) - math.log2(dist.p_v[j]))
        cond_div[u] = d

    mutual = sum(dist.p_u[i] * cond_div[dist.alphabet_u[i]] for i in dist.support_u)
    variance = sum(
        dist.p_u[i] * (cond_div[dist.alphabet_u[i]] - mutual) ** 2 for i in dist.support_u
    )
    third = sum(
        dist.p_u[i] * abs(cond_div[dist.alphabet_u[i]] - mutual) ** 3 for i in dist.support_u
    )

    profile = InfoProfile(
        mutual_information=float(mutual),
        cond_divergence=cond_div,
        coordination_variance=float(variance),
        third_abs_moment=float(third),
        min_prob_u=dist.min_prob_u,
        min_prob_v=dist.min_prob_v,
        min_prob_uv=dist.min_prob_uv,
    )
    dist._profile = profile
    return profile


def variance_decomposition_check(dist: JointDistribution) -> tuple[float, float]:
    """Return (V, Var(density) - E[Var(density | U)]).

    The two sides agree by the law of total variance; callers assert the match.
    """
    profile = info_profile(dist)
    lhs = profile.coordination_variance

    mutual = profile.mutual_information
    var_total = 0.0
    cond_var_mean = 0.0
    for i in dist.support_u:
        row_mean = profile.cond_divergence[dist.alphabet_u[i]]
        row_var = 0.0
        for j in dist.support_v:
            if dist.fractions[i][j] == 0:
                continue
            dens = (
                math.log2(dist.prob[i, j]) - math.log2(dist.p_u[i]) - math.log2(dist.p_v[j])
            )
            p = dist.prob[i, j]
            var_total += p * (dens - mutual) ** 2
            row_var += (p / dist.p_u[i]) * (dens - row_mean) ** 2
        cond_var_mean += dist.p_u[i] * row_var
    return lhs, var_total - cond_var_mean


def third_moment_ratio(dist: JointDistribution) -> tuple[float, float]:
    """Return (E|Z|^3 / V^{3/2}, 1/sqrt(min nonzero P_U)), Z the centered
    conditional divergence. The ratio never exceeds the bound; requires V > 0."""
    profile = info_profile(dist)
    v = profile.coordination_variance
    if v <= 0.0:
        raise DistributionError("zero variance: third-moment ratio undefined")
    ratio = profile.third_abs_moment / v**1.5
    bound = 1.0 / math.sqrt(dist.min_prob_u)
    return ratio, bound


def load_distribution(path) -> JointDistribution:
    """Read a distribution from the JSON document format.

    Schema::

        {
          "alphabet_u": [0, 1],
          "alphabet_v": [0, 1],
          "entries": [[0, 0, "1/3"], [0, 1, "1/3"], [1, 0, "1/3"]]
        }

    Entry values are rational strings ("num/den"), integers, or floats.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        alphabet_u = doc["alphabet_u"]
        alphabet_v = doc["alphabet_v"]
        raw_entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise DistributionError(f"distribution file missing field: {exc}") from exc
    entries = []
    for item in raw_entries:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise DistributionError(f"entry must be [u, v, value], got {item!r}")
        u, v, value = item
        entries.append(((u, v), value))
    return build_distribution(alphabet_u, alphabet_v, entries)


def dump_distribution(dist: JointDistribution, path) -> None:
    """Write the JSON document format read by load_distribution."""
    entries = [
        [dist.alphabet_u[i], dist.alphabet_v[j], str(dist.fractions[i][j])]
        for i, j in dist.support_pairs
    ]
    doc = {
        "alphabet_u": list(dist.alphabet_u),
        "alphabet_v": list(dist.alphabet_v),
        "entries": entries,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
