"""Mean-square sums, empirical kappa, sign-change counting, and the
short-interval detector, each against an independently structured oracle."""

import math

import numpy as np
import pytest

from selberg_signs import coefficients as co
from selberg_signs import statistics as st
from conftest import make_table


def brute_window(table, x, H, M):
    """Window sums enumerated by product n and divisor m (not by (m, k) loops)."""
    signed = absolute = 0.0
    for n in range(x, min(x + H, table.x_max) + 1):
        for m in range(M + 1, 2 * M + 1):
            if n % m == 0 and math.gcd(m, n // m) == 1:
                signed += table.values[n]
                absolute += abs(table.values[n])
    return abs(signed), absolute


def brute_changes(values, X):
    last = 0
    count = 0
    for m in range(1, X + 1):
        v = values[m]
        if v == 0:
            continue
        sign = 1 if v > 0 else -1
        if last and sign != last:
            count += 1
        last = sign
    return count


# ---------------------------------------------------------------------------
# rankin_selberg_sum
# ---------------------------------------------------------------------------

def test_rs_zeta(zeta_10k):
    result = st.rankin_selberg_sum(zeta_10k, 100)
    assert result.value == 100.0
    assert result.ratio == 1.0


def test_rs_chi4(chi4_10k):
    assert st.rankin_selberg_sum(chi4_10k, 10).value == 5.0


def test_rs_eps_check(zeta_10k):
    result = st.rankin_selberg_sum(zeta_10k, 100, eps_check=0.5)
    assert result.ratio == pytest.approx(100 / 100 ** 1.5)


def test_rs_range(zeta_10k):
    with pytest.raises(ValueError):
        st.rankin_selberg_sum(zeta_10k, 10 ** 5)


def test_rs_delta_linear_growth(delta_1m):
    for X in (10 ** 3, 10 ** 4, 10 ** 5):
        ratio = st.rankin_selberg_sum(delta_1m, X).ratio
        assert 0.1 <= ratio <= 10.0


# ---------------------------------------------------------------------------
# kappa_empirical
# ---------------------------------------------------------------------------

def test_kappa_zeta(zeta_10k):
    assert st.kappa_empirical(zeta_10k, 1000) == 1.0


def test_kappa_chi4(chi4_10k):
    # 500 odd integers in (1000, 2000]
    assert st.kappa_empirical(chi4_10k, 1000) == pytest.approx(
        math.log(500) / math.log(1000), abs=1e-12
    )


def test_kappa_delta_in_sato_tate_band(delta_1m):
    value = st.kappa_empirical(delta_1m, 10 ** 4)
    assert 0.9 <= value <= 1.05


def test_kappa_undefined_for_zero_block():
    table = make_table(np.zeros(101))
    assert st.kappa_empirical(table, 40) is None


def test_kappa_preconditions(zeta_10k):
    with pytest.raises(ValueError):
        st.kappa_empirical(zeta_10k, 9000)


# ---------------------------------------------------------------------------
# count_sign_changes
# ---------------------------------------------------------------------------

def test_zeta_has_no_changes(zeta_10k):
    assert st.count_sign_changes(zeta_10k, 10 ** 4).change_count == 0


def test_delta_first_ten(delta_10k):
    summary = st.count_sign_changes(delta_10k, 10, include_positions=True)
    assert summary.change_count == 7
    assert summary.change_positions == (1, 2, 3, 4, 5, 7, 8)
    assert summary.zero_policy == "skip_zeros"


def test_zero_skipping():
    table = make_table([0.0, 1.0, 0.0, -1.0])
    summary = st.count_sign_changes(table, 3)
    assert summary.change_count == 1


def test_against_brute_scan():
    rng = np.random.default_rng(21)
    for _ in range(20):
        values = rng.choice([-2.0, -1.0, 0.0, 0.0, 1.0, 3.0], size=200)
        values[0] = 0.0
        table = make_table(values)
        X = int(rng.integers(2, 199))
        assert st.count_sign_changes(table, X).change_count == brute_changes(values, X)


def test_scaling_and_negation_invariance():
    rng = np.random.default_rng(22)
    values = rng.choice([-1.0, 0.0, 1.0], size=300)
    values[0] = 0.0
    base = st.count_sign_changes(make_table(values), 299).change_count
    assert st.count_sign_changes(make_table(2.5 * values), 299).change_count == base
    assert st.count_sign_changes(make_table(-values), 299).change_count == base


def test_count_bounded_by_nonzeros():
    rng = np.random.default_rng(23)
    values = rng.choice([-1.0, 0.0, 1.0], size=100)
    values[0] = 0.0
    summary = st.count_sign_changes(make_table(values), 99)
    nonzero = int(np.sum(values[1:100] != 0))
    assert summary.change_count <= max(0, nonzero - 1)


# ---------------------------------------------------------------------------
# window_sums
# ---------------------------------------------------------------------------

def test_zeta_window_counts_pairs(zeta_10k):
    report = st.window_sums(zeta_10k, 100, 10, 3)
    assert report.S1 == report.S2 == 5.0
    assert not report.detected


def test_chi4_window_mixed_signs(chi4_10k):
    report = st.window_sums(chi4_10k, 20, 20, 2)
    assert report.S1 == 1.0
    assert report.S2 == 3.0
    assert report.detected


def test_empty_window(zeta_10k):
    # window [127, 128] with m in (60, 120]: 127 is prime and 128 = 64 * 2
    # has gcd 2, so no coprime pair lands in it
    report = st.window_sums(zeta_10k, 127, 1, 60)
    assert report.S1 == report.S2 == 0.0
    assert not report.detected


def test_window_against_brute(delta_10k, chi4_10k):
    rng = np.random.default_rng(31)
    for table in (delta_10k, chi4_10k):
        for _ in range(25):
            x = int(rng.integers(50, 5000))
            H = int(rng.integers(1, 80))
            M = int(rng.integers(1, min(40, x - 1)))
            report = st.window_sums(table, x, H, M)
            s1, s2 = brute_window(table, x, H, M)
            assert report.S1 == pytest.approx(s1, abs=1e-12)
            assert report.S2 == pytest.approx(s2, abs=1e-12)


def test_all_positive_windows_never_detect(zeta_10k):
    rng = np.random.default_rng(32)
    for _ in range(50):
        x = int(rng.integers(20, 8000))
        H = int(rng.integers(1, 100))
        M = int(rng.integers(1, min(50, x - 1)))
        report = st.window_sums(zeta_10k, x, H, M)
        assert report.S1 == report.S2
        assert not report.detected


def test_window_preconditions(zeta_10k):
    with pytest.raises(ValueError):
        st.window_sums(zeta_10k, 10 ** 4, 10, 3)
    with pytest.raises(ValueError):
        st.window_sums(zeta_10k, 100, 10, 100)


# ---------------------------------------------------------------------------
# sign_change_windows
# ---------------------------------------------------------------------------

def test_zeta_sweep_detects_nothing(zeta_10k):
    sweep = st.sign_change_windows(zeta_10k, 1000, 50, 3)
    assert sweep.fraction == 0.0
    assert sweep.detected_count == 0


def test_chi4_sweep_frozen_fraction(chi4_1m):
    # enumeration oracle: 22 of the 101 disjoint windows contain two products
    # 3k of opposite character sign (m = 4 contributes only zeros)
    sweep = st.sign_change_windows(chi4_1m, 10 ** 3, 10, 2)
    assert sweep.window_count == 101
    assert sweep.detected_count == 22
    assert sweep.fraction == pytest.approx(22 / 101)


def test_delta_sweep_majority_detected(delta_1m):
    sweep = st.sign_change_windows(delta_1m, 10 ** 4, 10 ** 2, 10)
    assert sweep.fraction >= 0.5


def test_sweep_h_validation(zeta_10k):
    with pytest.raises(ValueError, match="H < X"):
        st.sign_change_windows(zeta_10k, 100, 100, 3)


def test_sweep_stride_and_reports(chi4_10k):
    sweep = st.sign_change_windows(chi4_10k, 1000, 10, 2, stride=5, include_reports=True)
    assert sweep.window_count == 201
    assert len(sweep.reports) == 201
    assert sweep.detected_count == sum(r.detected for r in sweep.reports)


def test_sweep_thread_pool_matches_serial(chi4_10k, monkeypatch):
    serial = st.sign_change_windows(chi4_10k, 1000, 10, 2)
    monkeypatch.setenv(st.THREADS_ENV, "4")
    threaded = st.sign_change_windows(chi4_10k, 1000, 10, 2)
    assert threaded == serial


def test_threads_env_malformed(monkeypatch):
    monkeypatch.setenv(st.THREADS_ENV, "many")
    assert st._resolve_threads() == 1


# ---------------------------------------------------------------------------
# theorem_consistency
# ---------------------------------------------------------------------------

def test_positive_table_fails_as_expected(zeta_10k):
    report = st.theorem_consistency(zeta_10k, co.zeta_spec(), 2000, 100, 3)
    assert report.observed == 0
    assert report.admissible
    assert report.verdict == "fail"
    assert report.log_ratio is None


def test_positive_table_inadmissible_is_vacuous(zeta_10k):
    spec = co.zeta_spec(kappa=0.9)
    report = st.theorem_consistency(zeta_10k, spec, 2000, 100, 3)
    assert not report.admissible
    assert report.verdict == "vacuous"


def test_alternating_table_passes():
    values = np.array([0.0] + [(-1.0) ** m for m in range(1, 2202)])
    table = make_table(values)
    report = st.theorem_consistency(table, co.zeta_spec(), 1000, 100, 3)
    assert report.observed == 999
    assert report.verdict == "pass"
    assert report.log_ratio > 0


def test_kappa_capped_at_one(delta_10k):
    report = st.theorem_consistency(delta_10k, co.delta_spec(theta=1 / 6), 2000, 100, 5, kappa=1.2)
    assert report.kappa == 1.0
    assert any("capped" in note for note in report.notes)


def test_delta_consistency_passes(delta_1m):
    spec = co.delta_spec(theta=1 / 6)
    kappa_hat = st.kappa_empirical(delta_1m, 10 ** 4)
    report = st.theorem_consistency(delta_1m, spec, 10 ** 4, 100, 5, kappa=kappa_hat)
    assert report.verdict == "pass"
    assert report.windowed_detections > 0


# ---------------------------------------------------------------------------
# short-interval lower-bound shape
# ---------------------------------------------------------------------------

def test_proposition2_shape_delta(delta_1m):
    # eps = 0.1 absorbs the implicit constant at desk scale (see README);
    # the nominal eps = 1e-3 check fails by the structural factor ~4.
    report = st.proposition2_shape_check(delta_1m, 10 ** 4, eps=0.1)
    assert report.H == 16
    assert report.M == 2
    assert report.passed
    assert report.fraction >= report.required
    nominal = st.proposition2_shape_check(delta_1m, 10 ** 4, eps=1e-3)
    assert not nominal.passed
