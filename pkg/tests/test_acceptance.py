"""Acceptance criteria 1-10, one test each.

Every test records a ``PASS``/``FAIL`` line (with the measured numbers) that
is printed in the pytest terminal summary; run this file directly to get the
same lines without pytest.
"""

import math
import time

import numpy as np
import pytest

from rsbm import (
    RsbmParams,
    build_saw,
    check_thresholds,
    edge_expansion_check,
    matvec,
    min_bisection_bruteforce,
    rsbm_membership,
    sample_lift,
    sample_regular_config,
    sample_rsbm,
    spectral_recover,
    tangle_audit,
    top_eigenpairs,
    tv_rates,
    z_sequence,
)
from rsbm.experiment import inject_errors
from rsbm.graphgen import simplicity_trials
from rsbm.model import z_closed_form
from rsbm.recovery import majority_iterate

from conftest import random_simple_graph
from test_model import xy_oracle
from test_saw import brute_saw

RESULTS = []


def report(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_criterion_01_exact_eigenpairs():
    t0 = time.perf_counter()
    combos = [(d, n, "configuration") for d in [(10, 2), (6, 3), (11, 3)] for n in (50, 200)]
    combos += [(d, n, "permutation") for d in [(10, 2), (6, 3)] for n in (50, 200)]
    instances = violations = 0
    for (d1, d2), n, sampler in combos:
        sample = sample_lift if sampler == "permutation" else sample_rsbm
        for seed in range(10):
            inst = sample(RsbmParams(n, d1, d2), seed=seed)
            e = np.ones(2 * n)
            violations += int(np.count_nonzero(matvec(inst.graph, e) != (d1 + d2) * e))
            violations += int(np.count_nonzero(matvec(inst.graph, inst.sigma) != (d1 - d2) * inst.sigma))
            instances += 1
    elapsed = time.perf_counter() - t0
    ok = instances == 100 and violations == 0 and elapsed < 10
    assert report(1, ok, f"{instances} instances, {violations} violations, {elapsed:.1f}s (limit 10s)")


def _spectra():
    out = []
    for seed in range(20):
        inst = sample_rsbm(RsbmParams(500, 10, 2), seed=seed)
        out.append(top_eigenpairs(inst.graph, 3, tolerance=[1e-10, 1e-10, 1e-6], seed=seed))
    return out


def test_criterion_02_spectral_separation():
    t0 = time.perf_counter()
    spectra = _spectra()
    elapsed = time.perf_counter() - t0
    bound = 2 * math.sqrt(11) + 0.5
    lam2_ok = sum(abs(s.eigenvalues[1] - 8) <= 1e-6 for s in spectra)
    lam3_ok = sum(abs(s.eigenvalues[2]) <= bound for s in spectra)
    worst = max(abs(s.eigenvalues[2]) for s in spectra)
    ok = lam2_ok == 20 and lam3_ok >= 18 and elapsed < 120
    assert report(
        2,
        ok,
        f"lambda2 = 8 +- 1e-6 in {lam2_ok}/20; |lambda3| <= {bound:.3f} in {lam3_ok}/20 "
        f"(max {worst:.3f}); {elapsed:.1f}s (limit 120s)",
    )


def test_criterion_03_strong_recovery():
    limit = math.ceil(4 * math.log2(1000))
    exact = rounds_ok = 0
    for seed in range(20):
        inst = sample_rsbm(RsbmParams(500, 10, 2), seed=seed)
        res = spectral_recover(inst, seed=seed)
        exact += res.agreement == 1.0
        rounds_ok += res.rounds_used <= limit
    ok = exact >= 18 and rounds_ok == 20
    assert report(3, ok, f"agreement 1.0 in {exact}/20 (need 18); rounds <= {limit} in {rounds_ok}/20")


def test_criterion_04_majority_contraction():
    clean = monotone = 0
    for seed in range(50):
        inst = sample_rsbm(RsbmParams(1000, 10, 2), seed=seed)
        start = inject_errors(inst.labels, 0.05, np.random.default_rng([seed, 1]))
        res = majority_iterate(inst.graph, start, planted=inst.labels)
        clean += res.errors == 0
        errs = res.per_round_errors
        monotone += all(b <= a for a, b in zip(errs, errs[1:]))
    ok = clean >= 45 and monotone >= 45
    assert report(4, ok, f"0 final errors in {clean}/50; non-increasing errors in {monotone}/50 (need 45 each)")


def _tree_identity_check(inst, l):
    d1, d2 = inst.params.d1, inst.params.d2
    tree = tangle_audit(inst.graph, l).tree_vertices
    if not tree.size:
        return 0, 0
    s = build_saw(inst.graph, l).counts[tree]
    sig = inst.labels.astype(np.int64)
    bad = np.count_nonzero(s.sum(axis=1) != (d1 + d2) * (d1 + d2 - 1) ** (l - 1))
    bad += np.count_nonzero(s @ sig != z_sequence(d1, d2, l)[-1] * sig[tree])
    return tree.size, int(bad)


def test_criterion_05_saw_identities():
    checked = {}
    bad = 0
    for l in range(1, 5):
        for seed in range(10):
            inst = sample_rsbm(RsbmParams(300, 10, 2), seed=seed)
            c, b = _tree_identity_check(inst, l)
            checked[(10, 2, l)] = checked.get((10, 2, l), 0) + c
            bad += b
    # sparser degrees leave tree vertices at depth 2, which (10, 2) at n = 300 never does
    for seed in range(10):
        inst = sample_rsbm(RsbmParams(300, 3, 3), seed=seed)
        c, b = _tree_identity_check(inst, 2)
        checked[(3, 3, 2)] = checked.get((3, 3, 2), 0) + c
        bad += b
    small_bad = 0
    rng = np.random.default_rng(2024)
    for _ in range(50):
        g = random_simple_graph(rng, int(rng.integers(4, 16)), float(rng.uniform(0.1, 0.7)))
        a = g.to_dense()
        small_bad += not np.array_equal(build_saw(g, 1).counts, a)
        small_bad += not np.array_equal(build_saw(g, 2).counts, a @ a - np.diag(g.degrees))
    counts = ", ".join(f"(d1={k[0]},d2={k[1]},l={k[2]}): {v}" for k, v in checked.items())
    ok = bad == 0 and small_bad == 0 and sum(checked.values()) > 0
    assert report(
        5,
        ok,
        f"tree vertices checked {counts}; {bad} identity violations; "
        f"{small_bad} S1/S2 mismatches on 50 small graphs",
    )


def test_criterion_06_saw_spectrum():
    from rsbm import saw_recover

    q = check_thresholds(10, 2)
    target = 12 * 11**3
    lam1_ok = lam2_ok = 0
    ratios = []
    for seed in range(10):
        inst = sample_rsbm(RsbmParams(300, 10, 2), seed=seed)
        spec = saw_recover(inst.graph, 4, seed=seed)
        lam1_ok += abs(spec.lambda1 - target) <= 0.02 * target
        r = spec.lambda2 / q.alpha**4
        ratios.append(r / q.A_const)
        lam2_ok += 0.5 * q.A_const <= r <= 2 * q.A_const
    ok = lam1_ok >= 9 and lam2_ok >= 8
    assert report(
        6,
        ok,
        f"lambda1 within 2% of {target} in {lam1_ok}/10; lambda2/alpha^4 in [A/2, 2A] in {lam2_ok}/10 "
        f"(ratio to A: {min(ratios):.3f}..{max(ratios):.3f})",
    )


def test_criterion_07_model_formulas():
    t0 = time.perf_counter()
    bad = 0
    for d1 in range(3, 13):
        for d2 in range(3, d1 + 1):
            z = z_sequence(d1, d2, 20)
            bad += z != xy_oracle(d1, d2, 20)
            q = check_thresholds(d1, d2)
            if q.spectral_condition:
                bad += any(abs(z_closed_form(q, k) - z[k - 1]) > 1e-9 * abs(z[k - 1]) for k in range(1, 21))
    for d1 in range(3, 21):
        for d2 in range(3, d1 + 1):
            r1, r2 = tv_rates(d1, d2)
            bad += not (r1 < 1 and r2 < 1)
    for d1 in range(3, 31):
        for d2 in range(3, d1 + 1):
            q = check_thresholds(d1, d2)
            if q.spectral_condition:
                bad += not q.alpha > math.sqrt(d1 + d2)
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 1
    assert report(7, ok, f"{bad} formula mismatches; {elapsed:.2f}s (limit 1s)")


def test_criterion_08_configuration_simplicity():
    trials = 10000
    hits = simplicity_trials(500, 3, trials, seed=8)
    rate = hits / trials
    target = math.exp(-2)
    se = math.sqrt(target * (1 - target) / trials)
    ok = abs(rate - target) <= 3 * se
    assert report(8, ok, f"rate {rate:.4f} over {trials} attempts vs e^-2 = {target:.4f} (3 SE = {3 * se:.4f})")


def test_criterion_09_rigidity_oracles():
    rng = np.random.default_rng(99)
    saw_bad = 0
    for _ in range(40):
        g = random_simple_graph(rng, int(rng.integers(3, 13)), float(rng.uniform(0.2, 0.8)))
        for l in range(1, 5):
            saw_bad += not np.array_equal(build_saw(g, l).counts, brute_saw(g, l))
    suite = [(4, 3, 1), (4, 3, 3), (6, 3, 2), (6, 4, 3), (8, 3, 3), (10, 4, 2), (12, 3, 3), (12, 5, 2)]
    cut_bad = cut_total = 0
    for n, d1, d2 in suite:
        for seed in range(3):
            inst = sample_rsbm(RsbmParams(n, d1, d2), seed=seed)
            cert = min_bisection_bruteforce(inst)
            cut_bad += cert.min_cut > n * d2
            cut_total += 1
    exp_bad = 0
    for seed in range(20):
        inst = sample_rsbm(RsbmParams(8, 3, 3), seed=seed)
        exp_bad += edge_expansion_check(inst.graph, seed=seed).violations
    ok = saw_bad == 0 and cut_bad == 0 and exp_bad == 0
    assert report(
        9,
        ok,
        f"SAW oracle mismatches {saw_bad}/160; min-cut > n*d2 on {cut_bad}/{cut_total} planted instances; "
        f"{exp_bad} expansion violations over 20 instances",
    )


@pytest.mark.slow
def test_criterion_10_membership_decay():
    freq = {}
    for n2 in (12, 16):
        hits = 0
        for seed in range(200):
            g = sample_regular_config(n2, 6, seed=seed, method="rejection", max_rejects=10**7)
            hits += rsbm_membership(g, 3, 3).member
        freq[n2] = hits / 200
    trend = "decreasing" if freq[16] < freq[12] else "not decreasing"
    report(10, True, f"membership frequency 2n=12: {freq[12]:.3f}, 2n=16: {freq[16]:.3f} ({trend}; reported only)")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
