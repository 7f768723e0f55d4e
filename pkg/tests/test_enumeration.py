import math

import pytest

from hyplab import (
    CapExceeded,
    InsufficientData,
    build_ball_index,
    compile_cyclicprod,
    estimate_growth,
    sphere_sizes,
    sphere_sizes_exact,
)


class TestSphereSizes:
    def test_free2_closed_form(self, free2):
        sizes = sphere_sizes(free2, 8)
        assert sizes == [1] + [4 * 3 ** (k - 1) for k in range(1, 9)]

    def test_cp23_counts(self, cp23):
        assert sphere_sizes(cp23, 9) == [1, 3, 4, 6, 8, 12, 16, 24, 32, 48]

    def test_infinite_dihedral(self):
        assert sphere_sizes(compile_cyclicprod((2, 2)), 4) == [1, 2, 2, 2, 2]

    def test_cap_exceeded(self, free2):
        with pytest.raises(CapExceeded):
            sphere_sizes(free2, 10, cap=1000)

    def test_exact_matches_bfs(self, cp23, free2):
        assert sphere_sizes_exact(cp23, 12) == sphere_sizes(cp23, 12)
        assert sphere_sizes_exact(free2, 7) == sphere_sizes(free2, 7)

    def test_exact_scales_beyond_cap(self, free2):
        sizes = sphere_sizes_exact(free2, 60)
        assert sizes[60] == 4 * 3 ** 59


class TestBallIndex:
    def test_free2_b2(self, free2):
        ball = build_ball_index(free2, 2)
        assert len(ball) == 17

    def test_radius_zero(self, cp23):
        ball = build_ball_index(cp23, 0)
        assert [str(w) for w in ball.words] == ["eps"]

    def test_cp23_b5(self, cp23):
        assert len(build_ball_index(cp23, 5)) == 34

    def test_offsets_consistent(self, cp23):
        ball = build_ball_index(cp23, 6)
        assert sum(ball.sphere_sizes()) == len(ball)
        assert ball.sphere_offsets[-1] == len(ball)

    def test_lookup_inverts_positions(self, free2):
        ball = build_ball_index(free2, 4)
        for i, w in enumerate(ball.words):
            assert ball.lookup[w.ids] == i

    def test_sorted_by_length_then_shortlex(self, cp23):
        ball = build_ball_index(cp23, 5)
        keys = [(len(w.ids), w.ids) for w in ball.words]
        assert keys == sorted(keys)

    def test_frontier_property_free2(self, free2):
        # every sphere element is generator * (previous-sphere element)
        ball = build_ball_index(free2, 8)
        assert ball.sphere_sizes() == [1] + [4 * 3 ** (k - 1) for k in range(1, 9)]
        for w in ball.sphere(5):
            parent = w.ids[:-1]
            assert parent in ball.lookup


class TestEstimateGrowth:
    def test_free2_rate(self, free2):
        est = estimate_growth(sphere_sizes(free2, 12))
        assert abs(est.q_hat - 3.0) < 1e-6
        assert est.window == (6, 12)
        assert not est.degenerate

    def test_cp23_rate(self, cp23):
        est = estimate_growth(sphere_sizes_exact(cp23, 24))
        assert abs(est.q_hat - math.sqrt(2)) < 0.02

    def test_two_ended_degenerate(self):
        est = estimate_growth([1, 2, 2, 2, 2, 2, 2])
        assert est.degenerate
        assert abs(est.q_hat - 1.0) < 1e-9

    def test_finite_group_degenerate(self):
        est = estimate_growth([1, 1, 0, 0, 0, 0])
        assert est.degenerate

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            estimate_growth([1, 4, 12, 36, 108])

    def test_synthetic_recovery(self):
        q = 2.375
        sizes = [3.0 * q ** k for k in range(16)]
        est = estimate_growth(sizes)
        assert abs(est.q_hat - q) / q < 1e-12
        assert est.max_residual < 1e-12

    def test_e_hat_is_log_q_hat(self, free2):
        est = estimate_growth(sphere_sizes(free2, 10))
        assert est.e_hat == math.log(est.q_hat)
