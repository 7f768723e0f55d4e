import math

import numpy as np
import pytest

from hyplab import (
    DimensionMismatch,
    NotFreeBackend,
    RadialElement,
    apply_compressed,
    build_ball_index,
    build_compressed,
    eval_radial_combination,
    free_radial_oracle,
    make_element,
    norm_lower_bound,
    oracle_for_backend,
    radial_polynomials,
    theorem_rhs,
)
from tests.test_radial import FREE2_SIZES, random_elements


class TestRadialPolynomials:
    def test_p1_is_x(self):
        for q in (1, 3, 5, 2.5):
            assert radial_polynomials(q, 1)[1] in ([0, 1], [0.0, 1.0])

    def test_p2_q3(self):
        assert radial_polynomials(3, 2)[2] == [-4, 0, 1]

    def test_p3_q3(self):
        assert radial_polynomials(3, 3)[3] == [0, -7, 0, 1]

    def test_recurrence_matches_eval(self):
        q = 3
        polys = radial_polynomials(q, 8)
        xs = np.linspace(-2 * math.sqrt(q), 2 * math.sqrt(q), 7)
        for k, coeffs in enumerate(polys):
            direct = sum(c * xs ** i for i, c in enumerate(coeffs))
            selector = [0.0] * k + [1.0]
            via_recurrence = eval_radial_combination(q, selector, xs)
            assert np.allclose(direct, via_recurrence, rtol=1e-10, atol=1e-9)

    def test_endpoint_identity(self):
        # P_n(2 sqrt q) = q^(n/2 - 1) ((q - 1) n + q + 1) for 1 <= n <= 40
        for q in (3, 5):
            edge = np.array([2.0 * math.sqrt(q)])
            for n in range(1, 41):
                selector = [0.0] * n + [1.0]
                value = float(eval_radial_combination(q, selector, edge)[0])
                expected = q ** (n / 2 - 1) * ((q - 1) * n + q + 1)
                assert abs(value - expected) <= 1e-9 * expected


class TestFreeRadialOracle:
    def test_sigma_norms_free2(self):
        assert math.isclose(
            free_radial_oracle(3, make_element("sphere", n=1)), 2 * math.sqrt(3), rel_tol=1e-9
        )
        assert math.isclose(free_radial_oracle(3, make_element("sphere", n=2)), 8.0, rel_tol=1e-9)
        assert math.isclose(
            free_radial_oracle(3, make_element("sphere", n=3)), 10 * math.sqrt(3), rel_tol=1e-9
        )

    def test_identity(self):
        assert free_radial_oracle(7, make_element("sphere", n=0)) == 1.0

    def test_linear_in_scale(self):
        for a in random_elements(10, seed=3):
            base = free_radial_oracle(3, a)
            assert math.isclose(free_radial_oracle(3, a.scaled(3.5)), 3.5 * base, rel_tol=1e-12)

    def test_haagerup_constant_one(self):
        # free groups satisfy the sphere inequality with constant exactly 1,
        # so the summed bound dominates the true norm
        for a in random_elements(100, max_degree=30, seed=42):
            oracle = free_radial_oracle(3, a)
            assert oracle <= theorem_rhs(a, FREE2_SIZES) + 1e-9

    def test_backend_dispatch(self, free2, cp23):
        a = make_element("sphere", n=2)
        assert math.isclose(oracle_for_backend(free2, a), 8.0, rel_tol=1e-9)
        with pytest.raises(NotFreeBackend):
            oracle_for_backend(cp23, a)


class TestCompressedOperator:
    def test_sigma0_is_identity(self, cp23):
        ball = build_ball_index(cp23, 3)
        op = build_compressed(cp23, ball, make_element("sphere", n=0))
        f = np.arange(len(ball), dtype=float)
        assert np.array_equal(apply_compressed(op, f), f)

    def test_sigma1_on_delta_at_identity(self, free2):
        ball = build_ball_index(free2, 1)
        op = build_compressed(free2, ball, make_element("sphere", n=1))
        f = np.zeros(len(ball))
        f[ball.lookup[b""]] = 1.0
        out = apply_compressed(op, f)
        assert out[ball.lookup[b""]] == 0.0
        assert sum(out) == 4.0
        assert set(out[1:]) == {1.0}

    def test_self_adjoint_and_nonnegative(self, free2, cp23):
        rng = np.random.default_rng(0)
        for backend, radius in ((free2, 4), (cp23, 6)):
            ball = build_ball_index(backend, radius)
            element = RadialElement((0.5, 1.0, 0.25))
            op = build_compressed(backend, ball, element)
            ones = np.ones(len(ball))
            assert np.all(apply_compressed(op, ones) >= 0)
            for _ in range(5):
                f = rng.standard_normal(len(ball))
                g = rng.standard_normal(len(ball))
                lhs = float(apply_compressed(op, f) @ g)
                rhs = float(f @ apply_compressed(op, g))
                assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))

    def test_dimension_mismatch(self, cp23):
        ball = build_ball_index(cp23, 2)
        op = build_compressed(cp23, ball, make_element("sphere", n=1))
        with pytest.raises(DimensionMismatch):
            apply_compressed(op, np.ones(len(ball) + 1))


class TestNormLowerBound:
    def test_scalar_compression(self, cp23):
        est = norm_lower_bound(cp23, make_element("explicit", coeffs=[0.75]), 0)
        assert est.value == 0.75

    def test_sigma1_r20_free2(self, free2):
        est = norm_lower_bound(free2, make_element("sphere", n=1), 20)
        assert est.value >= 0.98 * 2 * math.sqrt(3)
        assert est.value <= 2 * math.sqrt(3) + 1e-9

    def test_sigma2_r16_free2(self, free2):
        est = norm_lower_bound(free2, make_element("sphere", n=2), 16)
        assert 7.5 <= est.value <= 8 + 1e-9

    def test_monotone_in_radius(self, free2, cp23):
        for backend in (free2, cp23):
            for n in (1, 2):
                values = [
                    norm_lower_bound(backend, make_element("sphere", n=n), radius).value
                    for radius in range(2, 13)
                ]
                for lo, hi in zip(values, values[1:]):
                    assert hi >= lo - 1e-9

    def test_oracle_dominates_compressions(self, free2):
        for a in random_elements(8, max_degree=6, seed=9):
            oracle = free_radial_oracle(3, a)
            for radius in (2, 5, 9, 14):
                assert norm_lower_bound(free2, a, radius).value <= oracle + 1e-6

    def test_radial_path_matches_ball_path(self, free2):
        # dual route: the symmetry-reduced iteration must agree with the
        # explicit ball compression wherever both are affordable
        from hyplab.opnorm import _lanczos_ascent, build_compressed

        for coeffs in ((0.0, 1.0), (0.0, 0.5, 1.0), (1.0, 0.0, 0.0, 2.0)):
            a = RadialElement(coeffs)
            radial = norm_lower_bound(free2, a, 5).value
            ball = build_ball_index(free2, 5)
            op = build_compressed(free2, ball, a)
            value, _, _, _ = _lanczos_ascent(
                lambda f: apply_compressed(op, f), np.ones(len(ball)), 1e-10, 10_000
            )
            assert math.isclose(radial, value, rel_tol=1e-9, abs_tol=1e-9)

    def test_not_converged_is_flagged_not_raised(self, cp23):
        est = norm_lower_bound(cp23, make_element("sphere", n=1), 8, max_iter=2)
        assert not est.converged
        assert est.value > 0
