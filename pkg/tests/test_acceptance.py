"""Acceptance suite: one numbered check per criterion, each printing a
PASS/FAIL line (run with -s to see them all).

All tolerances are pinned here.  Two checks encode target windows that the
exact mathematics of the implemented quantities provably violates; they
are implemented faithfully and left failing rather than loosened:

* criterion 8, family ii: the true ratio ||lambda(beta_n)|| / ((n+1)
  ||beta_n||_2) on free:2 rises above 1.0 from n = 2 on (1.0077 at n = 2,
  1.109 at n = 60; the summed sphere bounds exceed (n+1)||beta_n||_2 by a
  factor approaching ~1.115).
* criterion 8, family iv: the measured ratio grows like sqrt(log(n+1)),
  so ratio(60)/ratio(10) = 1.127, short of the pinned 1.5 (which matches a
  log(n+1) growth model instead).
"""

import math
import time

import numpy as np

import hyplab as hl
from tests.test_radial import FREE2_SIZES, random_elements

SEED_ELEMENTS = 2026
SEED_MC = 601
CRITERION9_RATIO_FIXTURES = {
    1: 0.839667188007,
    2: 0.599845465853,
    3: 0.496604586714,
    4: 0.413363864777,
    5: 0.371397008330,
    6: 0.321511507862,
}


def check(criterion: str, ok: bool, detail: str) -> None:
    print(f"[{criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{criterion}: {detail}"


def test_criterion_1_sphere_counts(free2, cp23):
    start = time.monotonic()
    free_sizes = hl.sphere_sizes(free2, 12)
    ok_free = free_sizes[0] == 1 and all(
        free_sizes[k] == 4 * 3 ** (k - 1) for k in range(1, 13)
    )
    cp_sizes = hl.sphere_sizes(cp23, 9)
    ok_cp = cp_sizes == [1, 3, 4, 6, 8, 12, 16, 24, 32, 48]
    ok_cross = (
        hl.sphere_sizes_exact(free2, 12) == free_sizes
        and hl.sphere_sizes_exact(cp23, 9) == cp_sizes
    )
    elapsed = time.monotonic() - start
    check(
        "criterion 1",
        ok_free and ok_cp and ok_cross and elapsed < 60,
        f"BFS sphere counts exact (free:2 k<=12, Z/2*Z/3 k<=9) in {elapsed:.1f}s",
    )


def test_criterion_2_growth(free2, cp23):
    q_free = hl.estimate_growth(hl.sphere_sizes(free2, 12)).q_hat
    q_cp = hl.estimate_growth(hl.sphere_sizes(cp23, 24)).q_hat
    ok_free = abs(q_free - 3.0) < 1e-6
    ok_cp = abs(q_cp - math.sqrt(2)) < 0.02
    lam_free = hl.build_boundary(free2).q
    lam_cp = hl.build_boundary(cp23).q
    ok_eigen = abs(lam_free - q_free) <= 0.02 * q_free and abs(lam_cp - q_cp) <= 0.02 * q_cp
    check(
        "criterion 2",
        ok_free and ok_cp and ok_eigen,
        f"q_hat(free:2)={q_free:.8f}, q_hat(Z/2*Z/3)={q_cp:.6f}, "
        f"boundary eigenvalues {lam_free:.6f}/{lam_cp:.6f} within 2%",
    )


def test_criterion_3_hyperbolicity(free2, free1):
    d2 = hl.estimate_delta(free2, 3).delta_hat
    d1 = hl.estimate_delta(free1, 3).delta_hat
    check("criterion 3", d2 == 0 and d1 == 0, f"delta_hat(free:2)={d2}, delta_hat(free:1)={d1}")


def test_criterion_4_oracle_exactness():
    q = 3
    targets = {1: 2 * math.sqrt(3), 2: 8.0, 3: 10 * math.sqrt(3)}
    ok = True
    for n, expected in targets.items():
        value = hl.free_radial_oracle(q, hl.make_element("sphere", n=n))
        ok = ok and abs(value - expected) <= 1e-9 * expected
    edge = np.array([2.0 * math.sqrt(q)])
    for n in range(1, 41):
        value = float(hl.eval_radial_combination(q, [0.0] * n + [1.0], edge)[0])
        expected = 3 ** (n / 2 - 1) * (2 * n + 4)
        ok = ok and abs(value - expected) <= 1e-9 * expected
    check(
        "criterion 4",
        ok,
        "oracle norms sigma_1/2/3 and endpoint identity P_n(2 sqrt 3) exact to 1e-9",
    )


def test_criterion_5_compression_soundness(free2):
    ok_monotone = True
    for n in (1, 2):
        a = hl.make_element("sphere", n=n)
        values = [hl.norm_lower_bound(free2, a, r).value for r in range(2, 13)]
        ok_monotone = ok_monotone and all(
            hi >= lo - 1e-9 for lo, hi in zip(values, values[1:])
        )
    ok_dominated = True
    for a in [hl.make_element("sphere", n=1), hl.make_element("sphere", n=2)] + random_elements(
        6, max_degree=8, seed=SEED_ELEMENTS
    ):
        oracle = hl.free_radial_oracle(3, a)
        for radius in (4, 9, 14):
            ok_dominated = ok_dominated and (
                hl.norm_lower_bound(free2, a, radius).value <= oracle + 1e-6
            )
    sigma1_r20 = hl.norm_lower_bound(free2, hl.make_element("sphere", n=1), 20).value
    ok_reach = sigma1_r20 >= 0.98 * 2 * math.sqrt(3)
    check(
        "criterion 5",
        ok_monotone and ok_dominated and ok_reach,
        f"monotone in R, dominated by oracle, sigma_1 at R=20 reaches {sigma1_r20:.6f}",
    )


def test_criterion_6_spherical_pairing_suite(free2):
    model = hl.build_boundary(free2)
    q = 3
    ok_closed = all(
        math.isclose(
            hl.spherical_pairing(model, n),
            ((q - 1) * n + q + 1) / ((q + 1) * q ** (n / 2)),
            rel_tol=1e-12,
        )
        for n in range(21)
    )
    ok_tail_route = all(
        abs(hl.spherical_via_tail(model, n) - hl.spherical_pairing(model, n)) <= 1e-12
        for n in range(21)
    )
    gamma = hl.canonical_geodesic(model, 8)
    ok_tails = all(
        math.isclose(hl.tail_measure(model, gamma, t), 0.25 * 3.0 ** -(t - 1), rel_tol=1e-12)
        for t in range(1, 9)
    ) and hl.tail_measure(model, gamma, 9) == 0.0
    ok_mc = True
    for n in (1, 2, 3, 5, 8):
        exact = hl.spherical_pairing(model, n)
        mc = hl.spherical_pairing(model, n, mode="mc", samples=100_000, seed=SEED_MC + n)
        ok_mc = ok_mc and abs(mc.value - exact) <= 3 * mc.stderr
    edge = np.array([2.0 * math.sqrt(q)])
    ok_identity = True
    for n in range(1, 21):
        lhs = FREE2_SIZES[n] * hl.spherical_pairing(model, n)
        rhs = float(hl.eval_radial_combination(q, [0.0] * n + [1.0], edge)[0])
        ok_identity = ok_identity and abs(lhs - rhs) <= 1e-9 * abs(rhs)
    check(
        "criterion 6",
        ok_closed and ok_tail_route and ok_tails and ok_mc and ok_identity,
        "exact Phi closed form, layer-cake route, tail law, 1e5-sample MC at 3 sigma, "
        "pairing-polynomial identity",
    )


def test_criterion_7_theorem_two_sided(free2):
    model = hl.build_boundary(free2)
    ok_window = True
    ok_chain = True
    for a in random_elements(50, max_degree=30, seed=SEED_ELEMENTS):
        oracle = hl.free_radial_oracle(3, a)
        rhs = hl.theorem_rhs(a, FREE2_SIZES)
        ratio = oracle / rhs
        ok_window = ok_window and 0.2 <= ratio <= 1.0 + 1e-9
        pairing = hl.radial_pairing(model, a, FREE2_SIZES)
        ok_chain = ok_chain and pairing <= oracle + 1e-6
    check(
        "criterion 7",
        ok_window and ok_chain,
        "oracle/theorem_rhs in [0.2, 1] and boundary pairing below the oracle "
        "for 50 seeded elements",
    )


def _family_rows(free2, family, schedule=None):
    return hl.run_sharpness(free2, family, 60, method="oracle", schedule=schedule)


def test_criterion_8_family_i(free2):
    rows = _family_rows(free2, "i")
    ratios = [row.quantities["ratio"] for row in rows]
    ok = all(0.5 <= r <= 1.0 for r in ratios)
    check(
        "criterion 8.i",
        ok,
        f"sphere-family ratio within [0.5, 1.0] (observed [{min(ratios):.4f}, {max(ratios):.4f}])",
    )


def test_criterion_8_family_ii(free2):
    """KNOWN FAILING at the pinned upper edge: the exact ratio exceeds 1.0
    for every n >= 2 (see module docstring)."""
    rows = _family_rows(free2, "ii")
    ratios = [row.quantities["ratio"] for row in rows]
    ok = all(0.3 <= r <= 1.0 for r in ratios)
    check(
        "criterion 8.ii",
        ok,
        f"ball-family ratio within [0.3, 1.0] (observed [{min(ratios):.4f}, "
        f"{max(ratios):.4f}]; KNOWN FAILING at the 1.0 edge, see module docstring)",
    )


def test_criterion_8_family_iii(free2):
    rows = _family_rows(free2, "iii")
    fit, = hl.fit_exponent(rows, "iii")
    ok = 1.35 <= fit.exponent_or_slope <= 1.60
    check(
        "criterion 8.iii",
        ok,
        f"fitted exponent {fit.exponent_or_slope:.4f} against 3/2, window {fit.window}",
    )


def test_criterion_8_family_iv(free2):
    start = time.monotonic()
    schedule = sorted(set(hl.default_schedule(60)) | {10})
    rows = _family_rows(free2, "iv", schedule=schedule)
    by_n = {row.n: row.quantities["ratio"] for row in rows}
    ordered = [by_n[n] for n in schedule]
    ok_increasing = all(hi > lo for lo, hi in zip(ordered, ordered[1:]))
    fits = {fit.model: fit for fit in hl.fit_exponent(rows, "iv")}
    ok_fits = set(fits) == {"log", "sqrtlog"} and all(
        0.0 <= fit.r_squared <= 1.0 for fit in fits.values()
    )
    elapsed = time.monotonic() - start
    check(
        "criterion 8.iv-a",
        ok_increasing and ok_fits and elapsed < 300,
        f"ratio strictly increasing, log fit r2={fits['log'].r_squared:.4f}, "
        f"sqrtlog fit r2={fits['sqrtlog'].r_squared:.4f}, {elapsed:.1f}s",
    )
    quotient = by_n[60] / by_n[10]
    check(
        "criterion 8.iv-b",
        quotient >= 1.5,
        f"ratio(60)/ratio(10) = {quotient:.4f} against the pinned 1.5 "
        "(KNOWN FAILING: the measured growth is sqrt-log, see module docstring)",
    )


def test_criterion_9_nonfree_smoke(cp23):
    sizes = hl.sphere_sizes_exact(cp23, 6)
    ok_monotone = True
    ratios = {}
    for n in range(1, 7):
        a = hl.make_element("sphere", n=n)
        values = [
            hl.norm_lower_bound(cp23, a, radius, tol=1e-10).value
            for radius in (n + 4, n + 6, n + 8)
        ]
        ok_monotone = ok_monotone and all(
            hi >= lo - 1e-9 for lo, hi in zip(values, values[1:])
        )
        ratios[n] = values[-1] / hl.theorem_rhs(a, sizes)
    ok_fixtures = all(
        math.isclose(ratios[n], CRITERION9_RATIO_FIXTURES[n], rel_tol=1e-8)
        for n in ratios
    )
    window = max(ratios.values()) / min(ratios.values())
    ok_window = window <= 3.0
    check(
        "criterion 9",
        ok_monotone and ok_fixtures and ok_window,
        f"Z/2*Z/3 compressions monotone, ratios frozen, window {window:.3f} <= 3",
    )
