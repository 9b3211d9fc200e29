"""Kernel backends: brute-force oracles, mutual agreement, selection."""

import itertools
import math

import numpy as np
import pytest

from coordbounds import _pykernels
from coordbounds._backend import backend_name, kernels
from coordbounds.types import log2_factorials

try:
    from coordbounds import _ckernels

    BACKENDS = [_pykernels, _ckernels]
except ImportError:  # extension not built in this environment
    _ckernels = None
    BACKENDS = [_pykernels]

NEG_INF = float("-inf")


def brute_row_logmass(s_max, lo, hi, log2_base, lgfact):
    """Direct enumeration of bounded count rows, linear-domain summation."""
    out = np.full(s_max + 1, NEG_INF)
    totals = {}
    ranges = [range(l, h + 1) for l, h in zip(lo, hi)]
    for row in itertools.product(*ranges):
        s = sum(row)
        if s > s_max:
            continue
        mass = lgfact[s]
        ok = True
        for count, lb in zip(row, log2_base):
            if count == 0:
                continue
            if lb == NEG_INF:
                ok = False
                break
            mass += count * lb - lgfact[count]
        if not ok:
            continue
        totals[s] = totals.get(s, 0.0) + 2.0**mass
    for s, value in totals.items():
        out[s] = math.log2(value)
    return out


@pytest.mark.parametrize("module", BACKENDS, ids=lambda m: m.backend_name)
class TestRowLogmass:
    def test_against_brute_force(self, module):
        rng = np.random.default_rng(7)
        for _ in range(40):
            width = int(rng.integers(1, 4))
            n = int(rng.integers(1, 14))
            lo = rng.integers(0, 3, size=width)
            hi = lo + rng.integers(0, 5, size=width)
            probs = rng.integers(1, 6, size=width).astype(float)
            probs /= probs.sum()
            lb = np.log2(probs)
            lgfact = log2_factorials(max(n, int(hi.sum())) + 1)
            got = module.row_logmass_table(n, lo, hi, lb, lgfact)
            want = brute_row_logmass(n, lo, hi, lb, lgfact)
            np.testing.assert_allclose(got, want, rtol=0, atol=1e-10)

    def test_zero_probability_cell_forced_empty(self, module):
        lgfact = log2_factorials(10)
        lb = np.array([0.0, NEG_INF])
        out = module.row_logmass_table(
            6, np.array([0, 0]), np.array([6, 0]), lb, lgfact
        )
        # only the all-mass-on-first-cell rows survive: S[s] = log2(1) = 0
        assert out[3] == pytest.approx(0.0, abs=1e-12)

    def test_infeasible_zero_cell(self, module):
        lgfact = log2_factorials(10)
        lb = np.array([0.0, NEG_INF])
        out = module.row_logmass_table(
            6, np.array([0, 2]), np.array([6, 0]), lb, lgfact
        )
        assert np.all(out == NEG_INF)

    def test_empty_count_interval_kills_row(self, module):
        # lo > hi in one cell: the interval contains no integer at all.
        lgfact = log2_factorials(10)
        lb = np.log2(np.array([0.5, 0.5]))
        out = module.row_logmass_table(
            6, np.array([0, 2]), np.array([6, 1]), lb, lgfact
        )
        assert np.all(out == NEG_INF)

    def test_single_symbol_row(self, module):
        lgfact = log2_factorials(8)
        lb = np.array([math.log2(0.25)])
        out = module.row_logmass_table(8, np.array([0]), np.array([8]), lb, lgfact)
        for s in range(9):
            assert out[s] == pytest.approx(s * math.log2(0.25), abs=1e-12)


@pytest.mark.parametrize("module", BACKENDS, ids=lambda m: m.backend_name)
class TestTypeSweep:
    def brute(self, n, log2_base, s_tables, lgfact):
        k = len(log2_base)
        lams, pis = [], []
        for counts in itertools.product(range(n + 1), repeat=k):
            if sum(counts) != n:
                continue
            lam = lgfact[n]
            pi = 0.0
            for i, c in enumerate(counts):
                lam += c * log2_base[i] - lgfact[c]
                pi += s_tables[i][c]
            lams.append(lam)
            pis.append(pi)
        return np.array(lams), np.array(pis)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_against_brute_force(self, module, k):
        rng = np.random.default_rng(100 + k)
        n = 9
        probs = rng.integers(1, 6, size=k).astype(float)
        probs /= probs.sum()
        lb = np.log2(probs)
        s_tables = rng.normal(size=(k, n + 1)) * 3.0
        s_tables[rng.random(size=s_tables.shape) < 0.15] = NEG_INF
        lgfact = log2_factorials(n)
        lam, pi = module.type_sweep(n, lb, s_tables, lgfact)
        want_lam, want_pi = self.brute(n, lb, s_tables, lgfact)
        assert len(lam) == math.comb(n + k - 1, k - 1)
        np.testing.assert_allclose(lam, want_lam, rtol=0, atol=1e-10)
        finite = np.isfinite(want_pi)
        np.testing.assert_allclose(pi[finite], want_pi[finite], rtol=0, atol=1e-10)
        assert np.all(pi[~finite] == NEG_INF)

    def test_mass_normalizes(self, module):
        n = 30
        lb = np.log2(np.array([0.5, 0.2, 0.3]))
        s_tables = np.zeros((3, n + 1))
        lgfact = log2_factorials(n)
        lam, _ = module.type_sweep(n, lb, s_tables, lgfact)
        assert np.exp2(lam).sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.skipif(_ckernels is None, reason="compiled backend unavailable")
class TestBackendAgreement:
    def test_row_tables_match(self):
        rng = np.random.default_rng(55)
        for _ in range(20):
            width = int(rng.integers(1, 4))
            n = int(rng.integers(50, 400))
            center = rng.integers(0, n, size=width)
            spread = rng.integers(1, n // 2 + 1, size=width)
            lo = np.maximum(0, center - spread)
            hi = np.minimum(n, center + spread)
            probs = rng.integers(1, 9, size=width).astype(float)
            probs /= probs.sum()
            lb = np.log2(probs)
            lgfact = log2_factorials(n)
            a = _pykernels.row_logmass_table(n, lo, hi, lb, lgfact)
            b = _ckernels.row_logmass_table(n, lo, hi, lb, lgfact)
            finite = np.isfinite(a) | np.isfinite(b)
            np.testing.assert_allclose(
                a[finite & np.isfinite(a)], b[finite & np.isfinite(a)], rtol=0, atol=1e-9
            )
            assert np.array_equal(np.isfinite(a), np.isfinite(b))

    def test_type_sweep_matches(self):
        rng = np.random.default_rng(56)
        n = 120
        for k in (2, 3):
            probs = rng.integers(1, 9, size=k).astype(float)
            probs /= probs.sum()
            lb = np.log2(probs)
            s_tables = rng.normal(size=(k, n + 1)) * 5.0
            lgfact = log2_factorials(n)
            lam_a, pi_a = _pykernels.type_sweep(n, lb, s_tables, lgfact)
            lam_b, pi_b = _ckernels.type_sweep(n, lb, s_tables, lgfact)
            np.testing.assert_allclose(lam_a, lam_b, rtol=0, atol=1e-9)
            np.testing.assert_allclose(pi_a, pi_b, rtol=0, atol=1e-9)


def test_active_backend_is_reported():
    assert backend_name() in {"pure", "compiled"}
    assert kernels.backend_name == backend_name()


def test_pure_backend_forced_in_subprocess():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "import coordbounds; print(coordbounds.backend_name())"],
        env={"COORDBOUNDS_BACKEND": "pure", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "pure"
