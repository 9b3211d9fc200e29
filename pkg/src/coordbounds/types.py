"""Method of types: empirical counts, typicality tests, enumeration of typical
joint types, exact type-class probabilities, and type quantization.

Typicality comparisons are made in exact rational arithmetic (the threshold is
taken at its exact binary value when given as a float), because boundary counts
decide feasibility of entire configurations.
"""

from __future__ import annotations

import hashlib
import math
import pickle
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .distributions import DistributionError, JointDistribution, as_fraction

__all__ = [
    "TypeVector",
    "ConditionalTypeTable",
    "TypicalitySpec",
    "QuantizationError",
    "LambdaCache",
    "type_of",
    "joint_type_of",
    "is_jointly_typical",
    "is_conditionally_typical",
    "joint_cell_bounds",
    "enumerate_typical_joint_types",
    "log_type_probability",
    "quantize_to_type",
    "log2_factorials",
    "default_lambda_cache",
]

_INV_LN2 = 1.0 / math.log(2.0)
NEG_INF = float("-inf")


class QuantizationError(ValueError):
    """Type quantization preconditions violated."""


@dataclass(frozen=True)
class TypeVector:
    """Occurrence counts of each symbol in a length-n sequence."""

    alphabet: tuple
    counts: tuple

    def __post_init__(self):
        if len(self.alphabet) != len(self.counts):
            raise ValueError("alphabet and counts length mismatch")
        if any(c < 0 or c != int(c) for c in self.counts):
            raise ValueError("counts must be nonnegative integers")
        if self.n <= 0:
            raise ValueError("empty type: counts sum to 0")

    @property
    def n(self) -> int:
        return sum(self.counts)

    def count(self, symbol) -> int:
        return self.counts[self.alphabet.index(symbol)]

    def as_distribution(self) -> dict:
        """Empirical distribution counts/n, exact."""
        n = self.n
        return {sym: Fraction(c, n) for sym, c in zip(self.alphabet, self.counts)}


@dataclass(frozen=True)
class ConditionalTypeTable:
    """Joint occurrence counts of symbol pairs, organized as rows per first symbol."""

    alphabet_u: tuple
    alphabet_v: tuple
    counts: tuple  # tuple of per-u rows, each a tuple of per-v counts

    def __post_init__(self):
        if len(self.counts) != len(self.alphabet_u):
            raise ValueError("row count mismatch with alphabet_u")
        for row in self.counts:
            if len(row) != len(self.alphabet_v):
                raise ValueError("column count mismatch with alphabet_v")
            if any(c < 0 for c in row):
                raise ValueError("counts must be nonnegative")

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def row_totals(self) -> dict:
        return {u: sum(row) for u, row in zip(self.alphabet_u, self.counts)}

    def u_type(self) -> TypeVector:
        return TypeVector(self.alphabet_u, tuple(sum(row) for row in self.counts))

    def joint_type(self) -> TypeVector:
        """The flattened type over the product alphabet, row-major."""
        alphabet = tuple((u, v) for u in self.alphabet_u for v in self.alphabet_v)
        counts = tuple(c for row in self.counts for c in row)
        return TypeVector(alphabet, counts)


@dataclass(frozen=True)
class TypicalitySpec:
    """Typicality threshold: a fixed delta, or the family c*sqrt(ln n / n).

    The convention family automatically satisfies delta_n -> 0 with
    n*delta_n^2 = c^2 ln n -> infinity.
    """

    mode: str
    delta: object = None
    c: object = None

    def __post_init__(self):
        if self.mode == "fixed":
            d = as_fraction(self.delta)
            if not 0 < d < 1:
                raise ValueError(f"fixed delta must be in (0,1), got {self.delta}")
            object.__setattr__(self, "delta", d)
        elif self.mode == "convention":
            c = as_fraction(self.c)
            if c <= 0:
                raise ValueError(f"convention coefficient must be positive, got {self.c}")
            object.__setattr__(self, "c", c)
        else:
            raise ValueError(f"unknown typicality mode {self.mode!r}")

    def delta_at(self, n: int):
        """Threshold for blocklength n: exact Fraction in fixed mode, float in
        convention mode."""
        if self.mode == "fixed":
            return self.delta
        if n < 2:
            raise ValueError(f"n too small: convention mode needs n >= 2, got {n}")
        return float(self.c) * math.sqrt(math.log(n) / n)


def type_of(sequence: Sequence, alphabet: Iterable) -> TypeVector:
    """Empirical type of a sequence over a declared alphabet."""
    alphabet = tuple(alphabet)
    index = {sym: i for i, sym in enumerate(alphabet)}
    counts = [0] * len(alphabet)
    if len(sequence) == 0:
        raise ValueError("empty sequence has no type")
    for x in sequence:
        if x not in index:
            raise ValueError(f"unknown symbol {x!r}")
        counts[index[x]] += 1
    return TypeVector(alphabet, tuple(counts))


def joint_type_of(u_seq: Sequence, v_seq: Sequence, alphabet_u, alphabet_v) -> ConditionalTypeTable:
    """Pair counts of two equal-length sequences."""
    if len(u_seq) != len(v_seq):
        raise ValueError("sequences must have equal length")
    alphabet_u = tuple(alphabet_u)
    alphabet_v = tuple(alphabet_v)
    iu = {sym: i for i, sym in enumerate(alphabet_u)}
    iv = {sym: j for j, sym in enumerate(alphabet_v)}
    rows = [[0] * len(alphabet_v) for _ in alphabet_u]
    for u, v in zip(u_seq, v_seq):
        if u not in iu or v not in iv:
            raise ValueError(f"unknown symbol pair ({u!r}, {v!r})")
        rows[iu[u]][iv[v]] += 1
    return ConditionalTypeTable(alphabet_u, alphabet_v, tuple(tuple(r) for r in rows))


def is_jointly_typical(joint: ConditionalTypeTable, dist: JointDistribution, delta) -> bool:
    """Per-cell check |count/n - P(u,v)| <= delta plus zero counts off supp P."""
    d = as_fraction(delta)
    n = joint.n
    for i, u in enumerate(joint.alphabet_u):
        for j, v in enumerate(joint.alphabet_v):
            c = joint.counts[i][j]
            p = dist.frac(u, v)
            if p == 0 and c > 0:
                return False
            if abs(Fraction(c) - n * p) > n * d:
                return False
    return True


def is_conditionally_typical(joint: ConditionalTypeTable, dist: JointDistribution, delta) -> bool:
    """Check |count(u,v) - N(u) P(v|u)| <= n*delta with zero counts where P(v|u)=0.

    Rows whose first symbol lies outside supp P_U fail unless empty (the
    conditional law is undefined there).
    """
    d = as_fraction(delta)
    n = joint.n
    for i, u in enumerate(joint.alphabet_u):
        row = joint.counts[i]
        n_u = sum(row)
        ui = dist.u_index[u]
        if dist.p_u_fractions[ui] == 0:
            if n_u > 0:
                return False
            continue
        for j, v in enumerate(joint.alphabet_v):
            cond = dist.fractions[ui][dist.v_index[v]] / dist.p_u_fractions[ui]
            c = row[j]
            if cond == 0 and c > 0:
                return False
            if abs(Fraction(c) - n_u * cond) > n * d:
                return False
    return True


def joint_cell_bounds(n: int, dist: JointDistribution, delta) -> tuple:
    """Exact integer count intervals per cell for joint typicality at blocklength n.

    Returns (lo, hi) integer matrices indexed like dist.prob; cells off the
    support are pinned to [0, 0]. An empty interval (lo > hi) marks an
    infeasible cell.
    """
    d = as_fraction(delta)
    nu, nv = len(dist.alphabet_u), len(dist.alphabet_v)
    lo = np.zeros((nu, nv), dtype=np.int64)
    hi = np.zeros((nu, nv), dtype=np.int64)
    for i in range(nu):
        for j in range(nv):
            p = dist.fractions[i][j]
            if p == 0:
                continue
            lo[i, j] = max(0, math.ceil(n * (p - d)))
            hi[i, j] = min(n, math.floor(n * (p + d)))
    return lo, hi


def enumerate_typical_joint_types(
    n: int, dist: JointDistribution, delta
) -> list[ConditionalTypeTable]:
    """All joint count tables with denominator n that are jointly typical.

    Cells are pruned to their exact count intervals, then completed by a
    depth-first sweep constrained to total n. Output is in lexicographic order
    of the row-major cell counts.
    """
    lo, hi = joint_cell_bounds(n, dist, delta)
    lo_flat = lo.ravel().tolist()
    hi_flat = hi.ravel().tolist()
    k = len(lo_flat)
    if any(l > h for l, h in zip(lo_flat, hi_flat)):
        return []
    # Remaining-capacity windows for pruning the completion sweep.
    suffix_lo = [0] * (k + 1)
    suffix_hi = [0] * (k + 1)
    for idx in range(k - 1, -1, -1):
        suffix_lo[idx] = suffix_lo[idx + 1] + lo_flat[idx]
        suffix_hi[idx] = suffix_hi[idx + 1] + hi_flat[idx]

    results = []
    cells = [0] * k

    def sweep(idx: int, remaining: int) -> None:
        if idx == k:
            if remaining == 0:
                rows = tuple(
                    tuple(cells[i * len(dist.alphabet_v) + j] for j in range(len(dist.alphabet_v)))
                    for i in range(len(dist.alphabet_u))
                )
                results.append(ConditionalTypeTable(dist.alphabet_u, dist.alphabet_v, rows))
            return
        low = max(lo_flat[idx], remaining - suffix_hi[idx + 1])
        high = min(hi_flat[idx], remaining - suffix_lo[idx + 1])
        for c in range(low, high + 1):
            cells[idx] = c
            sweep(idx + 1, remaining - c)
        cells[idx] = 0

    sweep(0, n)
    return results


def log2_factorials(n: int) -> np.ndarray:
    """log2 k! for k = 0..n."""
    return gammaln(np.arange(n + 1, dtype=np.float64) + 1.0) * _INV_LN2


def _base_items(base: Mapping) -> tuple:
    return tuple((sym, as_fraction(p)) for sym, p in base.items())


class LambdaCache:
    """Memo of exact type-class log-probabilities, reusable across blocklengths.

    Keys are (n, counts, base distribution items); values are log2
    probabilities. Writes are idempotent (the value is a pure function of the
    key), so concurrent fills are safe under the GIL.
    """

    MAGIC = b"CBLAM1\n"

    def __init__(self):
        self._store = {}

    def __len__(self):
        return len(self._store)

    def log_type_probability(self, n: int, type_vector: TypeVector, base: Mapping) -> float:
        if type_vector.n != n:
            raise ValueError(f"type has denominator {type_vector.n}, expected {n}")
        items = _base_items(base)
        base_syms = tuple(sym for sym, _ in items)
        if set(type_vector.alphabet) - set(base_syms):
            raise ValueError("type alphabet not covered by base distribution")
        counts = tuple(
            type_vector.counts[type_vector.alphabet.index(sym)]
            if sym in type_vector.alphabet
            else 0
            for sym in base_syms
        )
        key = (n, counts, items)
        hit = self._store.get(key)
        if hit is not None:
            return hit
        value = _log2_multinomial(n, counts, items)
        self._store[key] = value
        return value

    def save(self, path) -> None:
        payload = pickle.dumps(self._store, protocol=pickle.HIGHEST_PROTOCOL)
        digest = hashlib.sha256(payload).digest()
        with open(path, "wb") as fh:
            fh.write(self.MAGIC)
            fh.write(digest)
            fh.write(payload)

    def load(self, path) -> None:
        with open(path, "rb") as fh:
            magic = fh.read(len(self.MAGIC))
            if magic != self.MAGIC:
                raise ValueError(f"not a type-probability cache file: {path}")
            digest = fh.read(32)
            payload = fh.read()
        if hashlib.sha256(payload).digest() != digest:
            raise ValueError(f"cache file integrity check failed: {path}")
        self._store.update(pickle.loads(payload))

    def clear(self) -> None:
        self._store.clear()


def _log2_multinomial(n: int, counts: tuple, items: tuple) -> float:
    total = 0.0
    for c, (_, p) in zip(counts, items):
        if c == 0:
            continue
        if p == 0:
            return NEG_INF
        total += c * math.log2(float(p)) - gammaln(c + 1) * _INV_LN2
    return total + gammaln(n + 1) * _INV_LN2


default_lambda_cache = LambdaCache()


def log_type_probability(n: int, type_vector: TypeVector, base: Mapping, cache=None) -> float:
    """log2 of the probability that an i.i.d. base sequence of length n has the
    given type: the multinomial mass of the type class, via log-gamma.

    Returns -inf when the type puts mass outside the base support.
    """
    cache = default_lambda_cache if cache is None else cache
    return cache.log_type_probability(n, type_vector, base)


def quantize_to_type(target: Mapping, base: Mapping, k: int) -> TypeVector:
    """Round a distribution to a type with denominator k, preserving support.

    Counts are floor(k * target) plus one extra unit on the symbols with the
    largest fractional parts (ties broken by symbol order) until they sum to k.
    Guarantees max |C(x) - target(x)| <= 1/k and the divergence overhead
    D(C || base) - D(target || base) <= (|X|/k) log2 max(k, 1/min(base)).
    """
    if k < 1:
        raise QuantizationError(f"k too small: need k >= 1, got {k}")
    symbols = tuple(target.keys())
    b = {sym: as_fraction(p) for sym, p in target.items()}
    a = {sym: as_fraction(p) for sym, p in base.items()}
    support = [sym for sym in symbols if b[sym] > 0]
    if not support:
        raise QuantizationError("target distribution has empty support")
    for sym in support:
        if a.get(sym, Fraction(0)) == 0:
            raise QuantizationError(f"support violation: target symbol {sym!r} not in base support")
    pi_b = min(b[sym] for sym in support)
    if k < 1 / pi_b:
        raise QuantizationError(
            f"k too small: k = {k} < 1/min(target) = {1 / pi_b}; a floor could hit zero"
        )

    floors = {sym: math.floor(k * b[sym]) for sym in support}
    leftover = k - sum(floors.values())
    fractional = {sym: k * b[sym] - floors[sym] for sym in support}
    # Largest fractional part first; ties resolved by symbol order.
    order = sorted(range(len(support)), key=lambda i: (-fractional[support[i]], i))
    for i in order[:leftover]:
        floors[support[i]] += 1

    counts = tuple(floors.get(sym, 0) for sym in symbols)
    return TypeVector(symbols, counts)
