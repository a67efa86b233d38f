"""Acceptance gauntlet: every headline capability at its stated tolerance.

Each test prints exactly one pass or fail line with the measured numbers
so a transcript of this file doubles as the conformance report.  Golden
constants were derived with exact algebra and frozen; nothing here is
tuned to the implementation.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from parkcrit.analytic import (
    classify,
    empty_vertex_offspring,
    find_alpha_c,
    find_critical_time,
    flux_distribution,
    flux_zero_gf,
    occupancy_self_consistency,
)
from parkcrit.enumeration import check_against_oracle, flux_via_table, tutte_series
from parkcrit.laws import binary0k, geometric, make_finite_law, nongeneric_example, poisson
from parkcrit.simulate import sample_root_load


def report(capsys, name, failures, detail):
    verdict = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        print(f"\n[{verdict}] {name}: {detail}")
    assert not failures, "; ".join(failures)


def test_criterion_1_family_sweep(capsys):
    expected = {
        ("binary0k", 2): 1 / 14,
        ("poisson", None): 3 - 2 * math.sqrt(2),
        ("geometric", None): 1 / 8,
    }
    t0 = time.perf_counter()
    got = {key: find_alpha_c(fam, k=k) for (fam, k), _ in expected.items() for key in [(fam, k)]}
    elapsed = time.perf_counter() - t0
    errs = {fam: abs(got[(fam, k)] - val) for (fam, k), val in expected.items()}
    failures = [f"{fam}: err {e:.3g}" for fam, e in errs.items() if e > 1e-6]
    if elapsed > 10:
        failures.append(f"took {elapsed:.1f}s > 10s")
    report(
        capsys,
        "criterion 1, critical mean sweep over three families",
        failures,
        f"max error {max(errs.values()):.3g} (tol 1e-6) in {elapsed:.2f}s",
    )


def alpha_c_closed_form(k):
    s = math.sqrt((k + 7) / (k - 1))
    inner = (k - 1) * (k + 4) + k * math.sqrt((k + 7) * (k - 1))
    return k / (1 + 2 ** (-k - 2) * (3 + s) ** k * inner)


def test_criterion_2_binary_family_closed_form(capsys):
    t0 = time.perf_counter()
    rel_errs = {}
    for k in (2, 3, 4, 5, 8):
        target = alpha_c_closed_form(k)
        got = find_alpha_c("binary0k", k=k, tol=1e-11)
        rel_errs[k] = abs(got - target) / target
    elapsed = time.perf_counter() - t0
    failures = [f"k={k}: rel err {e:.3g}" for k, e in rel_errs.items() if e > 1e-6]
    report(
        capsys,
        "criterion 2, binary family critical mean closed form",
        failures,
        f"worst rel error {max(rel_errs.values()):.3g} over k in 2,3,4,5,8 in {elapsed:.2f}s",
    )


def test_criterion_3_golden_critical_points(capsys):
    cases = [
        (binary0k(Fraction(1, 14)), 3.0, 7 / 8, 4 * math.sqrt(6) / 9),
        (geometric(Fraction(1, 8)), 3.0, 27 / 32, 2 / math.sqrt(3)),
        (poisson(3 - 2 * math.sqrt(2)), 2 + math.sqrt(2), 0.7977283476917779, None),
        (nongeneric_example(1), 3.0, 13 / 16, None),
    ]
    failures = []
    worst_val = 0.0
    worst_id = 0.0
    for law, t_exp, x_exp, gf_exp in cases:
        r = classify(law)
        name = law.describe()
        if r.regime != "critical":
            failures.append(f"{name}: regime {r.regime}")
            continue
        errs = [abs(r.critical_time - t_exp), abs(r.crit_density - x_exp)]
        if gf_exp is not None:
            errs.append(abs(r.gf_at_crit - gf_exp))
        worst_val = max(worst_val, max(errs))
        if max(errs) > 1e-9:
            failures.append(f"{name}: value error {max(errs):.3g}")
        residual = abs(float(law.mu0) * r.crit_density * flux_zero_gf(law, r.crit_density) ** 2 - 1)
        worst_id = max(worst_id, residual)
        if residual > 1e-10:
            failures.append(f"{name}: fixed point residual {residual:.3g}")
    report(
        capsys,
        "criterion 3, golden critical points",
        failures,
        f"worst value error {worst_val:.3g} (tol 1e-9), "
        f"worst fixed point residual {worst_id:.3g} (tol 1e-10)",
    )


def test_criterion_4_enumeration_oracle(capsys):
    laws = [
        binary0k(Fraction(1, 14), k=2),
        binary0k(Fraction(1, 20), k=3),
        make_finite_law([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)]),
    ]
    t0 = time.perf_counter()
    failures = []
    for law in laws:
        try:
            check_against_oracle(law, vertex_order=6, flux_order=3)
        except Exception as exc:  # a mismatch is a hard failure, keep its text
            failures.append(f"{law.describe()}: {exc}")
    elapsed = time.perf_counter() - t0
    if elapsed > 60:
        failures.append(f"took {elapsed:.1f}s > 60s")
    report(
        capsys,
        "criterion 4, recursion vs brute force enumeration",
        failures,
        f"exact agreement for n <= 6, p <= 3 on 3 laws in {elapsed:.2f}s",
    )


def test_criterion_5_flux_law_identities(capsys):
    cases = [
        (binary0k(Fraction(1, 20), k=2), 72),
        (geometric(Fraction(1, 20)), 60),
    ]
    failures = []
    details = []
    for law, table_order in cases:
        name = law.describe()
        flux = flux_distribution(law, order=60)
        total = math.fsum(flux.probs)
        if not (1 - 1e-6 <= total <= 1 + 8 * math.ulp(1.0)):
            failures.append(f"{name}: total mass {total!r}")
        mean_a = float(law.mean())
        p = flux.empty_prob
        occ = flux.occupancy_probs(len(flux.probs))
        mean_occ = math.fsum(k * q for k, q in enumerate(occ))
        mean_flx = math.fsum(k * q for k, q in enumerate(flux.probs))
        occ_err = abs(mean_occ - (2 * (1 - p) - mean_a))
        flx_err = abs(mean_flx - ((1 - p) - mean_a))
        if occ_err > 1e-8 or flx_err > 1e-8:
            failures.append(f"{name}: moment identity errors {occ_err:.3g}, {flx_err:.3g}")
        rec = occupancy_self_consistency(law, flux, upto=55)
        rec_err = max(abs(v) for v in rec)
        if rec_err > 1e-6:
            failures.append(f"{name}: load recursion residual {rec_err:.3g}")
        table = tutte_series(law, table_order, 5)
        via = flux_via_table(law, table)
        if via.max_residual > 1e-6:
            failures.append(f"{name}: table residual {via.max_residual:.3g}")
        details.append(
            f"{name}: mass defect {abs(total - 1):.2g}, moments {max(occ_err, flx_err):.2g}, "
            f"recursion {rec_err:.2g}, table {via.max_residual:.2g}"
        )
    report(capsys, "criterion 5, flux law identities", failures, " | ".join(details))


def test_criterion_6_monte_carlo_agreement(capsys):
    law = binary0k(0.05)
    depth, samples, seed = 18, 20000, 42
    analytic = flux_distribution(law, order=30)
    p_ref = analytic.empty_prob
    t0 = time.perf_counter()
    loads_one = sample_root_load(law, depth, samples, seed=seed, threads=1)
    loads_many = sample_root_load(law, depth, samples, seed=seed, threads=8)
    elapsed = time.perf_counter() - t0
    failures = []
    if not np.array_equal(loads_one, loads_many):
        failures.append("thread counts changed the sample stream")
    counts = np.bincount(loads_one, minlength=6)
    n = float(samples)
    p_hat = counts[0] / n
    if abs(p_hat - p_ref) > 0.01:
        failures.append(f"empty prob off by {abs(p_hat - p_ref):.4f}")
    flux_hat = [(counts[0] + counts[1]) / n] + [counts[k + 1] / n for k in range(1, 4)]
    worst_z = 0.0
    for k in range(4):
        se = math.sqrt(analytic.probs[k] * (1 - analytic.probs[k]) / n)
        z = abs(flux_hat[k] - analytic.probs[k]) / se
        worst_z = max(worst_z, z)
        if z > 4:
            failures.append(f"flux {k}: {z:.2f} standard errors off")
    if elapsed > 120:
        failures.append(f"took {elapsed:.1f}s > 120s")
    report(
        capsys,
        "criterion 6, Monte Carlo vs analytic at depth 18",
        failures,
        f"|p_hat - p| = {abs(p_hat - p_ref):.2g} (tol 0.01), worst flux z = {worst_z:.2f} "
        f"(tol 4), identical across thread counts, {elapsed:.1f}s (tol 120s)",
    )


def test_criterion_7_regime_portraits(capsys):
    critical = [
        binary0k(Fraction(1, 14)),
        geometric(Fraction(1, 8)),
        poisson(3 - 2 * math.sqrt(2)),
        nongeneric_example(1),
    ]
    subcritical = [binary0k(0.05), geometric(0.05), nongeneric_example(0.1)]
    failures = []
    min_p, min_mean = 1.0, math.inf
    for law in critical:
        r = classify(law)
        if r.regime != "critical":
            failures.append(f"{law.describe()}: regime {r.regime}")
            continue
        off = empty_vertex_offspring(r.empty_prob, r.occupied_no_flux_prob)
        min_p = min(min_p, r.empty_prob)
        min_mean = min(min_mean, off.mean)
        if not (r.empty_prob > 0.5 and off.mean > 1):
            failures.append(f"{law.describe()}: p = {r.empty_prob:.3f}, mean = {off.mean:.3f}")
    min_tc, min_radius = math.inf, math.inf
    for law in subcritical:
        r = classify(law)
        if r.regime != "subcritical":
            failures.append(f"{law.describe()}: regime {r.regime}")
            continue
        t_c = find_critical_time(law).t
        min_tc = min(min_tc, t_c)
        min_radius = min(min_radius, law.radius)
        if not (t_c > 2 and law.radius >= 2):
            failures.append(f"{law.describe()}: t_c = {t_c:.3f}, radius = {law.radius}")
    report(
        capsys,
        "criterion 7, regime portraits",
        failures,
        f"critical: min empty prob {min_p:.3f} > 1/2, min offspring mean {min_mean:.3f} > 1; "
        f"subcritical: min t_c {min_tc:.3f} > 2, min radius {min_radius:.3g} >= 2",
    )


def test_criterion_8_boundary_criticality(capsys):
    failures = []
    pure = classify(nongeneric_example(1))
    info = find_critical_time(nongeneric_example(1))
    if pure.regime != "critical" or not pure.margin_vanishes:
        failures.append(f"pure law: regime {pure.regime}, margin_vanishes {pure.margin_vanishes}")
    if not info.at_radius or abs(info.t - 3.0) > 1e-12:
        failures.append(f"pure law: root at {info.t!r}, at_radius {info.at_radius}")
    diluted = classify(nongeneric_example(0.1))
    if diluted.regime != "subcritical" or diluted.test != "radius":
        failures.append(f"diluted law: regime {diluted.regime} via {diluted.test}")
    if diluted.margin_vanishes:
        failures.append("diluted law: margin should not vanish inside the disk")
    report(
        capsys,
        "criterion 8, criticality driven by the domain boundary",
        failures,
        f"pure mix critical with margin vanishing at t = {info.t} = radius; "
        f"diluted mix subcritical by the {diluted.test} test",
    )
