"""Acceptance gate: one pass/fail line per criterion.

Each test prints ``CRITERION n: PASS|FAIL -- detail`` (outside pytest's
capture) and then asserts, so the one-line verdicts always reach the
terminal.
"""

import math
import time

import numpy as np

from bergext import (
    CrossData,
    CutoffFamily,
    Jet,
    RegularizedLogWeight,
    Weight,
    bergman_metric_at_zero,
    build_model,
    clamp_max,
    extend_cross,
    extend_jet_direct,
    extend_jet_recursive,
    higher_kernel,
)
from bergext.functionals import final_example_norm
from bergext.quadrature import bidisk_rule, disk_rule, integrate
from bergext import sweeps


def _verdict(capsys, n, ok, detail, started, limit):
    dt = time.monotonic() - started
    line = "CRITERION %d: %s -- %s [%.1fs / limit %.0fs]" % (
        n, "PASS" if ok and dt < limit else "FAIL", detail, dt, limit)
    with capsys.disabled():
        print(line)
    assert ok, line
    assert dt < limit, line


def test_criterion_1_unweighted_closed_forms(capsys):
    t0 = time.monotonic()
    m = build_model("disk", Weight.zero(), 24)
    errs = []
    for k in range(7):
        exact = math.factorial(k) ** 2 * (k + 1) / math.pi
        errs.append(abs(higher_kernel(m, k) - exact) / exact)
    omega_err = abs(bergman_metric_at_zero(m) - 2.0) / 2.0
    worst = max(errs + [omega_err])
    _verdict(capsys, 1, worst < 1e-6,
             "B_k (k<=6) and omega_B at D=24, worst rel err %.2e" % worst,
             t0, 1.0)


def test_criterion_2_solver_equivalence(capsys):
    t0 = time.monotonic()
    rng = np.random.default_rng(2024)
    weights = [Weight.zero()] \
        + [Weight.halfplane(m) for m in (1.0, 2.0, 3.0, 4.0)] \
        + [clamp_max(Weight.halfplane(m), e, A)
           for (m, e, A) in ((1.0, 0.2, 5.0), (2.0, 0.1, 8.0),
                             (4.0, 0.4, 12.0), (0.0, 0.3, 4.0), (3.0, 0.05, 10.0))]
    models = {i: build_model("disk", w, 16) for i, w in enumerate(weights)}
    worst = 0.0
    for case in range(50):
        model = models[case % len(weights)]
        n = int(rng.integers(1, 6))
        vals = tuple(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        r1 = extend_jet_direct(model, Jet(vals))
        r2 = extend_jet_recursive(model, Jet(vals))
        dn = abs(r1.norm_sq - r2.norm_sq) / r1.norm_sq
        dc = np.abs(r1.coefficients - r2.coefficients).max() \
            / np.abs(r1.coefficients).max()
        worst = max(worst, dn, dc)
    _verdict(capsys, 2, worst < 1e-8,
             "direct vs recursive on 50 random cases, worst rel dev %.2e" % worst,
             t0, 30.0)


def test_criterion_3_lemma_suite(capsys):
    t0 = time.monotonic()
    res = sweeps.run_lemma_suite(degree=24, check_convergence=False)
    m_margin = min(r["metric_margin"] for r in res.rows)
    b_margin = min(r["bk_margin"] for r in res.rows)
    fd = max(r["fd_residual"] for r in res.rows)
    ok = m_margin >= -1e-9 and b_margin >= -1e-9 and fd < 1e-3
    _verdict(capsys, 3, ok,
             "metric margin %.2e, B_k margin %.2e, identity residual %.2e"
             % (m_margin, b_margin, fd), t0, 30.0)


def test_criterion_4_growth_sweep(capsys):
    t0 = time.monotonic()
    res = sweeps.run_claim1(ms=range(1, 9))
    r = [row["ratio"] for row in res.rows]
    ms = [row["m"] for row in res.rows]
    increasing = all(b > a for a, b in zip(r, r[1:]))
    big = r[-1] / r[0]
    slope = np.polyfit(np.log(ms[3:]), np.log(r[3:]), 1)[0]
    conv = all(row["converged"] for row in res.rows)
    ok = increasing and big > 10 and slope >= 1.5 and conv
    _verdict(capsys, 4, ok,
             "R(m) increasing=%s, R(8)/R(1)=%.1f (>10), slope=%.2f (>=1.5), "
             "converged=%s" % (increasing, big, slope, conv), t0, 120.0)


def test_criterion_5_clamped_ratio(capsys):
    t0 = time.monotonic()
    res = sweeps.run_claim2(eps_list=(0.4, 0.05), A=20.0, m=4.0, degree=24)
    by_eps = {row["eps"]: row["ratio"] for row in res.rows}
    ok = by_eps[0.05] > 2.0 * by_eps[0.4]
    _verdict(capsys, 5, ok,
             "ratio(eps=0.05)=%.3e vs 2*ratio(eps=0.4)=%.3e"
             % (by_eps[0.05], 2.0 * by_eps[0.4]), t0, 120.0)


def test_criterion_6_cross_divergence(capsys):
    t0 = time.monotonic()
    res = sweeps.run_claim34(eps_list=(0.2, 0.1, 0.05, 0.025), degree=16)
    n = [row["norm"] for row in res.rows]
    rhs = [row["rhs_full"] for row in res.rows]
    ratio = [row["ratio_full"] for row in res.rows]
    increasing = all(b > a for a, b in zip(n, n[1:]))
    blowup = n[-1] / n[0]
    bounded = max(rhs) <= 2.0 * min(rhs)
    monotone = all(b > a for a, b in zip(ratio, ratio[1:]))
    ok = increasing and blowup > 3.0 and bounded and monotone
    _verdict(capsys, 6, ok,
             "norm increasing=%s, final/initial=%.2f (>3), RHS within factor "
             "2=%s, ratio monotone=%s" % (increasing, blowup, bounded, monotone),
             t0, 300.0)


def test_criterion_7_final_example_rate(capsys):
    t0 = time.monotonic()
    worst = 0.0
    for eps in (0.1, 0.05):
        exact = math.pi * math.log(1 + 1 / eps**2)
        worst = max(worst, abs(final_example_norm(eps) - exact) / exact)
    _verdict(capsys, 7, worst < 0.10,
             "branch norm vs pi ln(1+1/eps^2), worst rel dev %.2e" % worst,
             t0, 10.0)


def test_criterion_8_cutoff_decay(capsys):
    t0 = time.monotonic()
    vals = [CutoffFamily("xi_eps", e).gradient_decay_integral()
            for e in (0.5, 0.25, 0.125, 0.0625)]
    monotone = all(b < a for a, b in zip(vals, vals[1:]))
    ok = monotone and vals[-1] < 0.5 * vals[0]
    _verdict(capsys, 8, ok,
             "grad integrals %s, monotone=%s, final/initial=%.2e"
             % (["%.2e" % v for v in vals], monotone, vals[-1] / vals[0]),
             t0, 10.0)


def test_criterion_9_property_suite(capsys):
    t0 = time.monotonic()
    checks = {}
    rng = np.random.default_rng(9)

    # reproducing property at 10 random points (rel 1e-5)
    m = build_model("disk", Weight.halfplane(1.5), 12)
    wts = m.rule.weights * np.exp(-np.asarray(m.weight.evaluate(m.rule.nodes), float))
    c = rng.standard_normal(13) + 1j * rng.standard_normal(13)
    fvals = np.polynomial.polynomial.polyval(m.rule.nodes, c)
    worst = 0.0
    for _ in range(10):
        z = 0.4 * (rng.standard_normal() + 1j * rng.standard_normal())
        rec = np.dot(wts, m.kernel(np.full_like(m.rule.nodes, z), m.rule.nodes) * fvals)
        exact = np.polynomial.polynomial.polyval(z, c)
        worst = max(worst, abs(rec - exact) / abs(exact))
    checks["reproducing"] = worst < 1e-5

    # Pythagoras and stationarity on a weighted cross extension
    w = RegularizedLogWeight(0.15, "z1-z2")
    rule = bidisk_rule(radial_order=(12, 12), angular_order=(8, 192),
                       grading_levels=8, diagonal_grading=True,
                       diagonal_levels=10)
    model = build_model("bidisk", w, 10, rule=rule)
    rep = extend_cross(model, CrossData((0.5, -0.2), (0.5, 1.0)))
    h0, h1 = rep.cross_parts
    checks["pythagoras"] = abs(rep.norm_sq - (h0 + h1)) / rep.norm_sq < 1e-8
    scale = np.abs(model.gram @ rep.coefficients).max()
    checks["stationarity"] = rep.diagnostics["stationarity_residual"] < 1e-8 * scale

    # quadrature exactness and rotational symmetry
    r = disk_rule(radial_order=12, angular_order=32)
    ex = max(abs(integrate(r, lambda z: z**a * np.conj(z) ** b)
                 - (2 * math.pi / (a + b + 2) if a == b else 0))
             for a in range(5) for b in range(5))
    checks["quadrature_exact"] = ex < 1e-12
    f = lambda z: np.abs(1 + z + z**2) ** 2
    rot = abs(integrate(r, f) - integrate(r.rotated(np.exp(2j * np.pi / 32)), f))
    checks["rotation_symmetry"] = rot < 1e-10

    ok = all(checks.values())
    _verdict(capsys, 9, ok,
             ", ".join("%s=%s" % kv for kv in sorted(checks.items())), t0, 120.0)
