"""Acceptance gate: nine numbered criteria, one test and one verdict each.

Every test prints a single ``criterion N: PASS/FAIL`` line with the
measured quantities next to the stated tolerance, then asserts.  Run
with ``pytest -v tests/test_acceptance.py`` (the whole file takes
roughly half an hour; the detection suites are 20 seeded runs each).
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from cecpd.dataio import nile
from cecpd.detector import DetectorConfig, detect_multiple, detect_single, profile
from cecpd.entropy import copula_entropy, knn_entropy
from cecpd.simulate import (
    gen_multivariate_case,
    gen_univariate_case,
    sample_frank_copula,
    sample_gaussian_copula,
)
from cecpd.two_sample import tce, tce_mi

GAUSSIAN_ENTROPY = 1.4189385332046727  # 0.5 * log(2*pi*e)
CE_RHO_09 = -0.8303656034108254  # 0.5 * log(1 - 0.9**2)
CE_RHO_03 = -0.047155339735620645  # 0.5 * log(1 - 0.3**2)

N_RUNS = 20


@pytest.fixture()
def verdict(capsys):
    """PASS/FAIL printer that bypasses capture so every line reaches the log."""

    def emit(number, ok, detail):
        line = "criterion %d: %s  (%s)" % (number, "PASS" if ok else "FAIL", detail)
        with capsys.disabled():
            print(line)
        return ok

    return emit


def detected_indices(series, cfg):
    """1-based first-index-of-new-regime for every detected point."""
    return [p.index + 1 for p in detect_multiple(series, cfg).points]


def matched(points, truth, tol):
    """truth value -> nearest detected point within tol (1-based)."""
    out = {}
    for t in truth:
        best = None
        for p in points:
            err = abs(p.index + 1 - t)
            if err <= tol and (best is None or err < abs(best.index + 1 - t)):
                best = p
        if best is not None:
            out[t] = best
    return out


def test_criterion_1_entropy_estimator_gaussian_oracle(verdict):
    t0 = time.time()
    estimates = [
        float(knn_entropy(np.random.default_rng(s).normal(size=5000), k=3))
        for s in range(10)
    ]
    elapsed = time.time() - t0
    err = abs(float(np.mean(estimates)) - GAUSSIAN_ENTROPY)
    ok = err <= 0.05 and elapsed < 30
    assert verdict(
        1, ok, "10-seed mean err %.4f <= 0.05 nats, %.1fs < 30s" % (err, elapsed)
    )


def test_criterion_2_copula_entropy_gaussian_oracle(verdict):
    estimates = []
    for s in range(10):
        rng = np.random.default_rng(s)
        z = rng.standard_normal((1000, 2))
        x = np.column_stack([z[:, 0], 0.9 * z[:, 0] + math.sqrt(1 - 0.81) * z[:, 1]])
        estimates.append(float(copula_entropy(x, k=3)))
    err = abs(float(np.mean(estimates)) - CE_RHO_09)
    ok = err <= 0.1
    assert verdict(2, ok, "10-seed mean err %.4f <= 0.1 nats of %.4f" % (err, CE_RHO_09))


def test_criterion_3_univariate_mean_and_meanvar_suites(verdict):
    rates = {}
    slowest = 0.0
    for case in ("mean", "mean-var"):
        good = 0
        for s in range(N_RUNS):
            series, truth = gen_univariate_case(case, seed=1000 + s)
            cfg = DetectorConfig(k=3, threshold=0.13, min_seg=30, seed=s)
            t0 = time.time()
            det = detected_indices(series, cfg)
            slowest = max(slowest, time.time() - t0)
            exact = len(det) == 3 and all(
                abs(d - t) <= 2 for d, t in zip(sorted(det), truth)
            )
            good += exact
        rates[case] = good
    ok = all(v >= 18 for v in rates.values()) and slowest < 120
    assert verdict(
        3,
        ok,
        "exactly-3-within-2: mean %d/20, mean-var %d/20, need >=18; slowest run %.1fs < 120s"
        % (rates["mean"], rates["mean-var"], slowest),
    )


def test_criterion_4_univariate_variance_suite(verdict):
    good = 0
    for s in range(N_RUNS):
        series, truth = gen_univariate_case("var", seed=1000 + s)
        cfg = DetectorConfig(k=3, threshold=0.13, min_seg=30, seed=s)
        seg = detect_multiple(series, cfg)
        hits = matched(seg.points, truth, tol=3)
        if len(hits) < 3:
            continue
        top_true = max(p.statistic for p in hits.values())
        spurious = [p for p in seg.points if p not in hits.values()]
        if all(p.statistic < top_true for p in spurious):
            good += 1
    ok = good >= 15
    assert verdict(
        4,
        ok,
        "all-3-within-3 with subordinate extras: %d/20, need >=15" % good,
    )


def test_criterion_5_multivariate_mean_and_meanvar_suites(verdict):
    rates = {}
    for case in ("mean", "mean-var"):
        good = 0
        for s in range(N_RUNS):
            series, truth = gen_multivariate_case(case, seed=2000 + s)
            cfg = DetectorConfig(k=3, threshold=0.13, min_seg=30, seed=s)
            det = detected_indices(series, cfg)
            hit = all(any(abs(d - t) <= 2 for d in det) for t in truth)
            good += hit
        rates[case] = good
    ok = all(v >= 18 for v in rates.values())
    assert verdict(
        5,
        ok,
        "all-3-within-2: mean %d/20, mean-var %d/20, need >=18"
        % (rates["mean"], rates["mean-var"]),
    )


def test_criterion_6_multivariate_variance_suite(verdict):
    # neighbor order 5 scored best for this case in a parameter sweep
    # (k in {3,5,8,10}, replicate counts 16/48, min_seg 10/30/40)
    good = 0
    for s in range(N_RUNS):
        series, truth = gen_multivariate_case("var", seed=2000 + s)
        cfg = DetectorConfig(k=5, threshold=0.05, min_seg=30, seed=s)
        det = detected_indices(series, cfg)
        hits = sum(1 for t in truth if any(abs(d - t) <= 5 for d in det))
        good += hits >= 2
    ok = good >= 12
    assert verdict(6, ok, "2-of-3-within-5 at threshold 0.05: %d/20, need >=12" % good)


def test_criterion_7_nile_change_location(verdict):
    series = nile()
    cfg = DetectorConfig()
    found = detect_single(series, cfg)
    year = series.labels[found.index]
    best_split, best_value = profile(series, cfg).argmax()
    ok = (
        abs(year - 1898) <= 2
        and best_split + 1 == found.index
        and best_value == found.statistic
    )
    assert verdict(
        7,
        ok,
        "detected year %d within 1898+-2, statistic %.4f is the profile maximum"
        % (year, found.statistic),
    )


def test_criterion_8_exact_invariants(verdict):
    checks = {"rank": 0, "symmetry": 0, "mi-route": 0, "schedule": 0}

    # bit-identical copula entropy under per-column monotone transforms
    warps = [np.exp, lambda c: c**3, lambda c: 2.0 * c + 1.0]
    for i in range(100):
        rng = np.random.default_rng(3000 + i)
        n = int(rng.integers(20, 51))
        d = int(rng.integers(1, 4))
        x = rng.normal(size=(n, d))
        if i % 3 == 0:
            x = np.floor(x * 2)  # ties
        y = np.column_stack([warps[j % 3](x[:, j]) for j in range(d)])
        a = float(copula_entropy(x, k=3, seed=i))
        b = float(copula_entropy(y, k=3, seed=i))
        checks["rank"] += a == b

    # group-relabeling symmetry and the two computation routes of the
    # statistic, on the same randomized two-sample pairs
    for i in range(100):
        rng = np.random.default_rng(4000 + i)
        d = int(rng.integers(1, 4))
        m = int(rng.integers(8, 40))
        n = int(rng.integers(8, 40))
        x1 = rng.normal(size=(m, d))
        x2 = rng.normal(loc=rng.uniform(-1, 1), size=(n, d))
        if i % 3 == 0:
            x1, x2 = np.floor(x1 * 2), np.floor(x2 * 2)
        seed = int(rng.integers(0, 2**31))
        forward = tce(x1, x2, seed=seed)
        checks["symmetry"] += forward.value == tce(x2, x1, seed=seed).value
        checks["mi-route"] += forward.value == tce_mi(x1, x2, seed=seed).value

    # detect_multiple is schedule-independent: any worker count, same result
    for i in range(100):
        rng = np.random.default_rng(5000 + i)
        half = int(rng.integers(22, 33))
        x = np.vstack(
            [
                rng.normal(size=(half, 1)),
                rng.normal(loc=rng.uniform(2, 6), size=(half, 1)),
            ]
        )
        cfg = DetectorConfig(min_seg=12, seed=i)
        serial = detect_multiple(x, cfg)
        threaded = detect_multiple(x, cfg, workers=3)
        same = [(p.index, p.statistic, p.depth) for p in serial.points] == [
            (p.index, p.statistic, p.depth) for p in threaded.points
        ] and [p.stats for p in serial.profiles] == [p.stats for p in threaded.profiles]
        checks["schedule"] += same

    ok = all(v == 100 for v in checks.values())
    assert verdict(
        8,
        ok,
        "bit-exact over 100 fixtures each: rank %d, symmetry %d, mi-route %d, schedule %d"
        % (checks["rank"], checks["symmetry"], checks["mi-route"], checks["schedule"]),
    )


def test_criterion_9_copula_sampler_goodness(verdict):
    uniform = [{"kind": "uniform"}, {"kind": "uniform"}]
    u = sample_frank_copula(5000, 0.9, uniform, seed=60)
    tau = stats.kendalltau(u[:, 0], u[:, 1]).statistic
    debye = integrate.quad(lambda t: t / math.expm1(t), 0, 0.9)[0] / 0.9
    tau_target = 1.0 - 4.0 / 0.9 * (1.0 - debye)
    tau_err = abs(tau - tau_target)

    marginals = [
        {"kind": "normal", "mu": 0.0, "delta": 2.0},
        {"kind": "exponential", "rate": 0.5},
    ]
    x = sample_gaussian_copula(5000, 0.3, marginals, seed=61)
    ce_err = abs(float(copula_entropy(x, k=3)) - CE_RHO_03)

    ok = tau_err <= 0.03 and ce_err <= 0.1
    assert verdict(
        9,
        ok,
        "Frank tau err %.4f <= 0.03 vs Debye oracle; Gaussian-copula CE err %.4f <= 0.1"
        % (tau_err, ce_err),
    )
