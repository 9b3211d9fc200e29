"""Independent oracles and constructive codes for the coordination problem.

exhaustive_expected_error recomputes the expected random-codebook error by
brute force over source and output sequences, sharing no machinery with the
type-based path (it even re-derives the admissible cell counts by direct
scanning). mc_expected_error and friends are seeded Monte Carlo estimators;
every trial draws from its own counter-based stream keyed by (seed, index),
so results are independent of evaluation order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .distributions import JointDistribution, as_fraction
from .types import joint_cell_bounds

__all__ = [
    "Codebook",
    "ErrorEstimate",
    "InstanceTooLargeError",
    "exhaustive_expected_error",
    "mc_expected_error",
    "evaluate_code",
    "derandomize_code",
]

EXHAUSTIVE_CAP = 10**6  # max sequences enumerated per alphabet
MC_DRAWS_PER_TRIAL_CAP = 10**7  # max sampled symbols per Monte Carlo trial

# Stream tags so that the independent uses of one seed never collide.
_TAG_MC_TRIAL = 0
_TAG_CANDIDATE_DRAW = 1
_TAG_CANDIDATE_EVAL = 2
_TAG_EVAL_TRIAL = 3


class InstanceTooLargeError(ValueError):
    """Exhaustive enumeration would exceed the sequence cap."""


@dataclass(frozen=True)
class ErrorEstimate:
    """A Monte Carlo (or exact) error value.

    For Monte Carlo estimates std_error = sqrt(mean(1-mean)/trials); exact
    evaluations carry trials=0 and std_error=0.0.
    """

    mean: float
    trials: int
    std_error: float
    seed: int


@dataclass(frozen=True)
class Codebook:
    """An explicit list of output codewords of common length n."""

    n: int
    codewords: tuple
    seed: int

    def __post_init__(self):
        for word in self.codewords:
            if len(word) != self.n:
                raise ValueError("codeword length mismatch")

    @property
    def size(self) -> int:
        return len(self.codewords)

    def to_text(self) -> str:
        """One codeword per line, symbols space-separated."""
        return "".join(" ".join(str(sym) for sym in word) + "\n" for word in self.codewords)

    @classmethod
    def from_text(cls, text: str, alphabet_v, seed: int = 0) -> "Codebook":
        lookup = {str(sym): sym for sym in alphabet_v}
        words = []
        for line in text.splitlines():
            if not line.strip():
                continue
            try:
                words.append(tuple(lookup[token] for token in line.split()))
            except KeyError as exc:
                raise ValueError(f"unknown symbol in codebook text: {exc}") from exc
        if not words:
            raise ValueError("codebook text contains no codewords")
        n = len(words[0])
        return cls(n=n, codewords=tuple(words), seed=seed)


def _trial_generator(seed: int, tag: int, index: int) -> Generator:
    """Independent stream for one (seed, purpose, trial) triple."""
    return Generator(Philox(SeedSequence(entropy=seed, spawn_key=(tag, index))))


def _check_cap(alphabet_size: int, n: int, what: str) -> None:
    if alphabet_size**n > EXHAUSTIVE_CAP:
        raise InstanceTooLargeError(
            f"instance too large: |{what}|^n = {alphabet_size}^{n} exceeds {EXHAUSTIVE_CAP}"
        )


def _admissible_counts(n: int, dist: JointDistribution, delta) -> list:
    """Per-cell admissible counts, re-derived by direct exact scanning.

    admissible[i][j][c] says whether c occurrences of the pair (u_i, v_j) in a
    length-n sequence pair are compatible with joint typicality at delta.
    """
    d = as_fraction(delta)
    table = []
    for i in range(len(dist.alphabet_u)):
        row = []
        for j in range(len(dist.alphabet_v)):
            p = dist.fractions[i][j]
            ok = []
            for c in range(n + 1):
                if p == 0 and c > 0:
                    ok.append(False)
                else:
                    ok.append(abs(Fraction(c, n) - p) <= d)
            row.append(tuple(ok))
        table.append(row)
    return table


_exhaustive_pi_cache: dict = {}


def _exhaustive_pi_by_source(n: int, dist: JointDistribution, delta):
    """For every source sequence: its probability and its exact success chance,
    both obtained by complete enumeration."""
    key = (dist.digest, n, as_fraction(delta))
    hit = _exhaustive_pi_cache.get(key)
    if hit is not None:
        return hit
    _check_cap(len(dist.alphabet_u), n, "U")
    _check_cap(len(dist.alphabet_v), n, "V")
    admissible = _admissible_counts(n, dist, delta)
    nu, nv = len(dist.alphabet_u), len(dist.alphabet_v)

    v_seqs = []
    for v_seq in itertools.product(range(nv), repeat=n):
        weight = math.prod(dist.p_v[j] for j in v_seq)
        if weight > 0.0:
            v_seqs.append((v_seq, weight))

    entries = []
    for u_seq in itertools.product(range(nu), repeat=n):
        w_u = math.prod(dist.p_u[i] for i in u_seq)
        if w_u == 0.0:
            continue
        pi = 0.0
        for v_seq, w_v in v_seqs:
            counts = [[0] * nv for _ in range(nu)]
            for i, j in zip(u_seq, v_seq):
                counts[i][j] += 1
            if all(
                admissible[i][j][counts[i][j]] for i in range(nu) for j in range(nv)
            ):
                pi += w_v
        entries.append((w_u, min(pi, 1.0)))
    _exhaustive_pi_cache[key] = entries
    return entries


def exhaustive_expected_error(n: int, m: int, dist: JointDistribution, delta) -> float:
    """Brute-force oracle for the expected random-codebook error.

    Iterates every source sequence, and for each one every output sequence,
    then averages (1 - success probability)^m. Enforces the enumeration cap.
    """
    if m < 1:
        raise ValueError(f"codebook size must be >= 1, got {m}")
    entries = _exhaustive_pi_by_source(n, dist, delta)
    return float(sum(w * (1.0 - pi) ** m for w, pi in entries))


def _cdf(p: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return cdf


def _flat_bounds(n: int, dist: JointDistribution, delta):
    lo, hi = joint_cell_bounds(n, dist, delta)
    return lo.ravel(), hi.ravel()


def mc_expected_error(
    n: int, m: int, dist: JointDistribution, delta, trials: int, seed: int
) -> ErrorEstimate:
    """Monte Carlo estimate of the expected random-codebook error.

    Each trial samples a fresh source sequence and a fresh codebook of m
    i.i.d. output codewords from its own keyed stream, and records a failure
    when no codeword is jointly typical with the source sequence.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if m < 1:
        raise ValueError(f"codebook size must be >= 1, got {m}")
    if m * (n + 1) > MC_DRAWS_PER_TRIAL_CAP:
        raise InstanceTooLargeError(
            f"instance too large: each trial would sample a codebook of {m} "
            f"length-{n} codewords"
        )
    lo_flat, hi_flat = _flat_bounds(n, dist, delta)
    nu, nv = len(dist.alphabet_u), len(dist.alphabet_v)
    cdf_u, cdf_v = _cdf(dist.p_u), _cdf(dist.p_v)
    cells = nu * nv
    offsets = (np.arange(m) * cells)[:, None]

    failures = 0
    for t in range(trials):
        gen = _trial_generator(seed, _TAG_MC_TRIAL, t)
        draws = gen.random(n * (m + 1))
        u_idx = np.searchsorted(cdf_u, draws[:n], side="right")
        v_idx = np.searchsorted(cdf_v, draws[n:], side="right").reshape(m, n)
        joint = u_idx[None, :] * nv + v_idx
        counts = np.bincount((joint + offsets).ravel(), minlength=m * cells).reshape(
            m, cells
        )
        typical = ((counts >= lo_flat) & (counts <= hi_flat)).all(axis=1)
        if not typical.any():
            failures += 1
    mean = failures / trials
    std_error = math.sqrt(mean * (1.0 - mean) / trials)
    return ErrorEstimate(mean=mean, trials=trials, std_error=std_error, seed=seed)


def _codeword_indices(code: Codebook, dist: JointDistribution) -> np.ndarray:
    lookup = dist.v_index
    try:
        return np.array([[lookup[sym] for sym in word] for word in code.codewords])
    except KeyError as exc:
        raise ValueError(f"codeword symbol outside alphabet_v: {exc}") from exc


def _code_failure(u_idx, words_idx, lo_flat, hi_flat, nv, cells) -> bool:
    """True when no codeword is jointly typical with the given source sequence."""
    m = words_idx.shape[0]
    joint = np.asarray(u_idx)[None, :] * nv + words_idx
    offsets = (np.arange(m) * cells)[:, None]
    counts = np.bincount((joint + offsets).ravel(), minlength=m * cells).reshape(m, cells)
    return not ((counts >= lo_flat) & (counts <= hi_flat)).all(axis=1).any()


def evaluate_code(
    code: Codebook,
    dist: JointDistribution,
    delta,
    mode: str = "exhaustive",
    trials: int | None = None,
    seed: int | None = None,
):
    """Error probability of the first-typical-index encoder over a fixed codebook.

    Exhaustive mode returns the exact float P[no codeword jointly typical with
    the source]; monte-carlo mode returns an ErrorEstimate.
    """
    n = code.n
    words_idx = _codeword_indices(code, dist)
    lo_flat, hi_flat = _flat_bounds(n, dist, delta)
    nu, nv = len(dist.alphabet_u), len(dist.alphabet_v)
    cells = nu * nv

    if mode == "exhaustive":
        _check_cap(nu, n, "U")
        total = 0.0
        for u_seq in itertools.product(range(nu), repeat=n):
            w_u = math.prod(dist.p_u[i] for i in u_seq)
            if w_u == 0.0:
                continue
            if _code_failure(u_seq, words_idx, lo_flat, hi_flat, nv, cells):
                total += w_u
        return float(min(1.0, total))

    if mode == "monte-carlo":
        if trials is None or seed is None:
            raise ValueError("monte-carlo mode needs trials and seed")
        cdf_u = _cdf(dist.p_u)
        failures = 0
        for t in range(trials):
            gen = _trial_generator(seed, _TAG_EVAL_TRIAL, t)
            u_idx = np.searchsorted(cdf_u, gen.random(n), side="right")
            if _code_failure(u_idx, words_idx, lo_flat, hi_flat, nv, cells):
                failures += 1
        mean = failures / trials
        return ErrorEstimate(
            mean=mean,
            trials=trials,
            std_error=math.sqrt(mean * (1.0 - mean) / trials),
            seed=seed,
        )

    raise ValueError(f"unknown mode {mode!r}")


def derandomize_code(
    n: int,
    m: int,
    dist: JointDistribution,
    delta,
    candidates: int,
    seed: int,
    mc_trials: int = 4096,
) -> tuple[Codebook, ErrorEstimate]:
    """Draw candidate random codebooks and keep the best one.

    Candidate errors are evaluated exhaustively when the source space is small
    enough, otherwise by Monte Carlo with a fixed per-candidate trial budget.
    Ties keep the earliest candidate, so the result is a pure function of the
    arguments.
    """
    if candidates < 1:
        raise ValueError(f"candidates must be >= 1, got {candidates}")
    if m < 1:
        raise ValueError(f"codebook size must be >= 1, got {m}")
    exhaustive_ok = len(dist.alphabet_u) ** n <= EXHAUSTIVE_CAP
    cdf_v = _cdf(dist.p_v)

    best: tuple[Codebook, ErrorEstimate] | None = None
    for c in range(candidates):
        gen = _trial_generator(seed, _TAG_CANDIDATE_DRAW, c)
        v_idx = np.searchsorted(cdf_v, gen.random(m * n), side="right").reshape(m, n)
        code = Codebook(
            n=n,
            codewords=tuple(
                tuple(dist.alphabet_v[j] for j in row) for row in v_idx
            ),
            seed=seed,
        )
        if exhaustive_ok:
            exact = evaluate_code(code, dist, delta, mode="exhaustive")
            estimate = ErrorEstimate(mean=exact, trials=0, std_error=0.0, seed=seed)
        else:
            estimate = evaluate_code(
                code,
                dist,
                delta,
                mode="monte-carlo",
                trials=mc_trials,
                seed=(seed << 20) + (_TAG_CANDIDATE_EVAL << 16) + c,
            )
        if best is None or estimate.mean < best[1].mean:
            best = (code, estimate)
    return best
