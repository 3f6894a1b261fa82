"""Recall models: analytic formulas against independent oracles."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import binom as scipy_binom

from bucketed_topk.core import Assignment, BucketScheme, ProblemShape
from bucketed_topk.exact import exact_topk_oracle
from bucketed_topk.recall import (
    binom_cdf,
    empirical_recall,
    empirical_recall_rows,
    expected_recall_error,
    expected_recall_kb1,
    monte_carlo_recall,
    worst_case_recall_error,
)

I = Assignment.INTERLEAVED


def placement_model_recall(k: int, b: int, k_b: int) -> Fraction:
    """Exact mean recall under equiprobable placement, by enumeration.

    Places the k top values independently and uniformly into b buckets
    (all b**k outcomes) and counts sum_j min(k_b, load_j) recoveries.
    This is the model the analytic recurrence describes, evaluated
    without any shared code.
    """
    total = Fraction(0)
    for outcome in itertools.product(range(b), repeat=k):
        loads = [0] * b
        for bucket in outcome:
            loads[bucket] += 1
        total += sum(min(k_b, t) for t in loads)
    return total / (b**k * k)


class TestBinomCdf:
    def test_zero_successes_is_q_power(self):
        for b in (2, 7, 256):
            for trials in (1, 5, 40):
                want = ((b - 1) / b) ** trials
                assert binom_cdf(0, trials, 1 / b) == pytest.approx(want, abs=1e-13)

    def test_full_support_is_one(self):
        assert binom_cdf(5, 5, 0.3) == 1.0
        assert binom_cdf(0, 0, 0.9) == 1.0

    def test_half_coin_three_flips(self):
        # enumerate the 8 outcomes: 4 have <= 1 success
        assert binom_cdf(1, 3, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_p_one_degenerate(self):
        assert binom_cdf(3, 3, 1.0) == 1.0
        assert binom_cdf(2, 3, 1.0) == 0.0

    def test_against_scipy_grid(self):
        rng = np.random.default_rng(0)
        for trials in (1, 2, 17, 300, 4096, 65536):
            for p in (1e-6, 1 / 2048, 0.125, 0.5, 0.875):
                xs = {0, 1, min(7, trials), trials // 2, trials - 1, trials}
                xs.update(int(v) for v in rng.integers(0, trials + 1, size=3))
                for x in xs:
                    if x < 0:
                        continue
                    want = float(scipy_binom.cdf(x, trials, p))
                    got = binom_cdf(int(x), trials, p)
                    assert got == pytest.approx(want, abs=1e-12), (
                        f"trials={trials} p={p} x={x}: got {got}, want {want}"
                    )

    def test_huge_trials_spot_checks(self):
        # 2**20 trials: cheap tail points for several p, plus one
        # mid-mass point where the recurrence walks half the support
        for p in (1e-6, 1 / 2048, 0.125, 0.875):
            for x in (0, 1, 63, 2**20 - 1, 2**20):
                want = float(scipy_binom.cdf(x, 2**20, p))
                assert binom_cdf(x, 2**20, p) == pytest.approx(want, abs=1e-12)
        want = float(scipy_binom.cdf(2**19, 2**20, 0.5))
        assert binom_cdf(2**19, 2**20, 0.5) == pytest.approx(want, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            binom_cdf(-1, 5, 0.5)
        with pytest.raises(ValueError):
            binom_cdf(6, 5, 0.5)
        with pytest.raises(ValueError):
            binom_cdf(1, 5, 0.0)
        with pytest.raises(ValueError):
            binom_cdf(1, 5, 1.5)


class TestExpectedRecall:
    def test_kb_equals_k_is_exact(self):
        for k, b in [(1, 1), (4, 2), (16, 7)]:
            est = expected_recall_error(k, b, k)
            assert est.expected_error == 0.0
            assert est.expected_recall == 1.0

    def test_four_into_four_buckets(self):
        # placement model enumerates 256 outcomes: E[R] = 175/256
        want = placement_model_recall(4, 4, 1)
        assert want == Fraction(175, 256)
        est = expected_recall_error(4, 4, 1)
        assert est.expected_recall == pytest.approx(float(want), abs=1e-13)

    @pytest.mark.parametrize(
        "k,b,k_b",
        [(4, 3, 2), (5, 2, 2), (5, 3, 1), (6, 2, 3), (3, 5, 1), (6, 4, 2)],
    )
    def test_small_cases_match_enumeration(self, k, b, k_b):
        want = float(placement_model_recall(k, b, k_b))
        est = expected_recall_error(k, b, k_b)
        assert est.expected_recall == pytest.approx(want, abs=1e-12)

    def test_large_case_matches_exact_closed_form(self):
        # (k=256, b=256, k_b=1): recall is 1 - (255/256)**256, evaluated
        # here in exact rational arithmetic
        want = 1 - Fraction(255, 256) ** 256
        est = expected_recall_error(256, 256, 1)
        assert est.expected_recall == pytest.approx(float(want), abs=1e-10)
        assert est.expected_error == pytest.approx(1 - float(want), abs=1e-10)

    def test_error_recall_complement(self):
        rng = np.random.default_rng(1)
        for _ in range(40):
            k = int(rng.integers(1, 300))
            b = int(rng.integers(1, 500))
            k_b = int(rng.integers(1, k + 1))
            est = expected_recall_error(k, b, k_b)
            assert 0.0 <= est.expected_recall <= 1.0
            assert 0.0 <= est.expected_error <= 1.0
            assert est.expected_error == pytest.approx(1 - est.expected_recall, abs=1e-15)

    def test_error_non_increasing_in_b_and_kb(self):
        ks = [64]
        bs = [2**i for i in range(1, 11)]
        for k in ks:
            for k_b in (1, 2, 4):
                errs = [expected_recall_error(k, b, k_b).expected_error for b in bs]
                assert all(y <= x + 1e-12 for x, y in zip(errs, errs[1:]))
            for b in (16, 64, 256):
                errs = [expected_recall_error(k, b, k_b).expected_error
                        for k_b in range(1, 9)]
                assert all(y <= x + 1e-12 for x, y in zip(errs, errs[1:]))


class TestClosedFormKb1:
    def test_four_four(self):
        assert expected_recall_kb1(4, 4) == pytest.approx(175 / 256, abs=1e-14)

    def test_single_bucket_single_element(self):
        assert expected_recall_kb1(1, 1) == 1.0

    def test_many_buckets_matches_arithmetic(self):
        want = (2048 / 256) * (1 - (2047 / 2048) ** 256)
        assert expected_recall_kb1(256, 2048) == pytest.approx(want, rel=1e-12)

    def test_matches_recurrence_on_grid(self):
        for k in (1, 2, 16, 256, 1000):
            for b in (1, 2, 3, 64, 512, 4096):
                closed = expected_recall_kb1(k, b)
                general = expected_recall_error(k, b, 1).expected_recall
                assert general == pytest.approx(closed, abs=1e-10)


class TestWorstCase:
    def test_concentrated_quarter(self):
        assert worst_case_recall_error(16, 4, 4, 1) == pytest.approx(0.75)

    def test_kb_equals_k_recovers_everything(self):
        assert worst_case_recall_error(16, 4, 4, 4) == 0.0

    def test_singleton_buckets_are_exact(self):
        for n in (8, 50, 257):
            k = min(5, n)
            assert worst_case_recall_error(n, k, n, 1) == 0.0

    def test_never_negative(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(1, 400))
            b = int(rng.integers(1, n + 1))
            cap = -(-n // b)
            k_b = int(rng.integers(1, cap + 1))
            k = int(rng.integers(1, min(n, b * k_b) + 1))
            if k_b > k:
                continue
            err = worst_case_recall_error(n, k, b, k_b)
            assert 0.0 <= err <= 1.0


class TestEmpiricalRecall:
    def test_worked_example(self):
        row = [11.0, 3.0, 10.0, 6.0, 1.0, 4.0, 8.0, 5.0, 2.0, 9.0, 7.0]
        from bucketed_topk.approx import approx_topk

        got = approx_topk(row, 4, BucketScheme(b=3, k_b=2, assignment=I))
        want = exact_topk_oracle(row, 4)
        assert empirical_recall(got.row(0), want.row(0), 4) == 0.75

    def test_identical_rows_recall_one(self):
        r = exact_topk_oracle(np.arange(10.0), 4)
        assert empirical_recall(r.row(0), r.row(0), 4) == 1.0

    def test_disjoint_rows_recall_zero(self):
        assert empirical_recall([0, 1, 2], [3, 4, 5], 3) == 0.0

    def test_mismatched_k_rejected(self):
        with pytest.raises(ValueError):
            empirical_recall([0, 1], [0, 1, 2], 3)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((6, 64))
        from bucketed_topk.approx import approx_topk

        got = approx_topk(x, 8, BucketScheme(b=8, k_b=1, assignment=I))
        want = exact_topk_oracle(x, 8)
        per_row = empirical_recall_rows(got, want)
        for r in range(6):
            assert per_row[r] == empirical_recall(got.row(r), want.row(r), 8)


class TestMonteCarlo:
    def test_exact_scheme_has_recall_one_zero_variance(self):
        mc = monte_carlo_recall(
            ProblemShape(m=1, n=64, k=8),
            BucketScheme(b=1, k_b=8, assignment=I),
            trials=50,
            seed=0,
        )
        assert mc.mean_recall == 1.0
        assert mc.stderr == 0.0

    def test_deterministic_in_seed_and_blocking(self):
        shape = ProblemShape(m=1, n=512, k=32)
        scheme = BucketScheme(b=32, k_b=1, assignment=I)
        a = monte_carlo_recall(shape, scheme, trials=200, seed=9)
        b = monte_carlo_recall(shape, scheme, trials=200, seed=9, block_rows=17)
        assert a == b
        c = monte_carlo_recall(shape, scheme, trials=200, seed=10)
        assert c != a

    def test_agrees_with_model_in_dilute_regime(self):
        # The placement model is exact only when top values are dilute
        # (k << n) and buckets are large (k_b << n/b); check agreement
        # there at 3 combined standard errors.
        configs = [
            (16384, 32, 32, 1),
            (16384, 32, 16, 2),
        ]
        for n, k, b, k_b in configs:
            analytic = expected_recall_error(k, b, k_b)
            mc = monte_carlo_recall(
                ProblemShape(m=1, n=n, k=k),
                BucketScheme(b=b, k_b=k_b, assignment=I),
                trials=2000,
                seed=0,
            )
            z = (mc.mean_recall - analytic.expected_recall) / mc.stderr
            assert abs(z) <= 3.0, f"(n={n},k={k},b={b},k_b={k_b}): z={z:.2f}"

    def test_dense_selection_beats_model_recall(self):
        # At high k/n the placement model understates recall because
        # real buckets have finite capacity; the bias direction is a
        # stable fact worth pinning.
        analytic = expected_recall_error(256, 256, 1)
        mc = monte_carlo_recall(
            ProblemShape(m=1, n=2048, k=256),
            BucketScheme(b=256, k_b=1, assignment=I),
            trials=1500,
            seed=0,
        )
        assert mc.mean_recall > analytic.expected_recall + 3 * mc.stderr
