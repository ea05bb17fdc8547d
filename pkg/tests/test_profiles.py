"""速度曲线测试：对数正态脉冲、σ 反解、梯形相位与多笔叠加"""

import math

import numpy as np
import pytest
from scipy.integrate import quad, trapezoid

from armtraj.errors import DegenerateDuration, DisconnectedPolyline, Infeasible, ValidationError
from armtraj.profiles import (
    LOGNORMAL,
    R_TARGET_EXPOSITION,
    R_TARGET_TESTS,
    TRAPEZOIDAL,
    LognormalStroke,
    SegmentSpec,
    lognormal_cdf,
    lognormal_position,
    lognormal_speed,
    plan_strokes,
    solve_sigma,
    solve_sigma_bisect,
    stroke_for_duration,
    superpose_strokes,
    trapezoid_distance,
    trapezoid_position,
    trapezoid_speed,
    trapezoid_times,
)
from armtraj.trajectory import numeric_speed


class TestLognormal:
    def test_unit_area(self):
        """D = 1 时速度脉冲的积分为 1（100 组随机 μ、σ）"""
        rng = np.random.default_rng(7)
        for mu, sigma in zip(rng.uniform(-1, 1, 100), rng.uniform(0.1, 0.8, 100)):
            stroke = LognormalStroke(0.0, mu, sigma)
            upper = math.exp(mu + 10 * sigma)
            area, _ = quad(lambda t: lognormal_speed(t, stroke), 0.0, upper,
                           points=[stroke.peak_time], limit=200, epsabs=1e-12, epsrel=1e-12)
            assert area == pytest.approx(1.0, abs=1e-6)

    def test_zero_before_activation(self):
        stroke = LognormalStroke(1.0, 0.0, 0.3, D=5.0)
        assert lognormal_speed(1.0, stroke) == 0.0
        assert lognormal_speed(0.5, stroke) == 0.0
        assert lognormal_cdf(1.0, 1.0, 0.0, 0.3) == 0.0

    def test_scalar_in_scalar_out(self):
        stroke = LognormalStroke(0.0, 0.0, 0.3)
        assert isinstance(lognormal_speed(1.0, stroke), float)
        assert lognormal_speed(np.array([0.5, 1.0]), stroke).shape == (2,)

    def test_cdf_derivative_matches_speed(self):
        """CDF 的中心差分与 D = 1 的速度一致（1e-5）"""
        stroke = LognormalStroke(0.2, -0.3, 0.4)
        h = 1e-6
        for t in np.linspace(0.25, 3.0, 50):
            fd = (lognormal_cdf(t + h, 0.2, -0.3, 0.4) - lognormal_cdf(t - h, 0.2, -0.3, 0.4)) / (2 * h)
            assert fd == pytest.approx(lognormal_speed(t, stroke), abs=1e-5)

    def test_peak_time(self):
        stroke = LognormalStroke(0.5, 0.2, 0.3)
        t = np.linspace(0.51, 3.0, 20001)
        assert t[np.argmax(lognormal_speed(t, stroke))] == pytest.approx(stroke.peak_time, abs=2e-4)

    @pytest.mark.parametrize('kwargs', [
        {'sigma': 0.0},
        {'sigma': -0.1},
        {'t0': -1.0},
        {'D': -2.0},
        {'mu': math.inf},
    ])
    def test_stroke_validation(self, kwargs):
        params = {'t0': 0.0, 'mu': 0.0, 'sigma': 0.3, **kwargs}
        with pytest.raises(ValidationError):
            LognormalStroke(**params)

    def test_shift_activation_shifts_law(self):
        """t0 平移 Δ：速度与进度曲线整体平移 Δ"""
        shift = 1.25
        base = LognormalStroke(0.5, -0.2, 0.35, D=40.0)
        moved = LognormalStroke(0.5 + shift, -0.2, 0.35, D=40.0)
        t = np.linspace(0.0, 4.0, 401)
        assert np.allclose(lognormal_speed(t + shift, moved), lognormal_speed(t, base), rtol=1e-9, atol=1e-12)
        assert np.allclose(lognormal_cdf(t + shift, 1.75, -0.2, 0.35), lognormal_cdf(t, 0.5, -0.2, 0.35),
                           rtol=1e-9, atol=1e-12)

    def test_median_time_is_midpoint(self):
        """t = t0 + e^μ 时进度恰为一半"""
        seg = SegmentSpec((0, 0, 0), (80, -40, 20), 2.0)
        p = lognormal_position(0.3 + math.exp(0.1), seg, 0.3, 0.1, 0.3)
        assert np.allclose(p, [40, -20, 10], atol=1e-9)

    def test_position_monotonic_per_axis(self):
        seg = SegmentSpec((0, 10, 5), (30, -20, 5.5), 2.0)
        sigma = solve_sigma(2.0, R_TARGET_TESTS)
        p = lognormal_position(np.linspace(0, 4, 400), seg, 0.0, 0.0, sigma)
        assert p.shape == (400, 3)
        assert np.all(np.diff(p[:, 0]) >= 0)
        assert np.all(np.diff(p[:, 1]) <= 0)
        assert np.all(np.diff(p[:, 2]) >= 0)
        assert p[0].tolist() == [0, 10, 5]


class TestSolveSigma:
    def test_two_second_stroke(self):
        """t_e = 2 s、r = 0.99 → σ ≈ 0.29796"""
        assert solve_sigma(2.0, 0.99) == pytest.approx(0.29796, abs=1e-4)

    def test_endpoint_fraction_random(self):
        rng = np.random.default_rng(11)
        for t_e in rng.uniform(1.05, 10.0, 1000):
            sigma = solve_sigma(t_e, R_TARGET_TESTS)
            assert lognormal_cdf(t_e, 0.0, 0.0, sigma) == pytest.approx(R_TARGET_TESTS, abs=1e-9)

    @pytest.mark.parametrize('t_e,r', [(2.0, R_TARGET_TESTS), (3.5, R_TARGET_EXPOSITION), (9.0, 0.999)])
    def test_closed_form_agrees_with_bisection(self, t_e, r):
        assert solve_sigma(t_e, r) == pytest.approx(solve_sigma_bisect(t_e, r), abs=1e-9)

    def test_with_activation_time(self):
        sigma = solve_sigma(5.0, 0.95, t0=2.0)
        assert lognormal_cdf(5.0, 2.0, 0.0, sigma) == pytest.approx(0.95, abs=1e-9)

    @pytest.mark.parametrize('t_e', [0.5, 1.0])
    def test_degenerate_duration(self, t_e):
        with pytest.raises(DegenerateDuration):
            solve_sigma(t_e, 0.99)

    def test_short_stroke_uses_time_rescale(self):
        """时长 ≤ 1 s 时 stroke_for_duration 仍保证 t_e 处完成 r 比例"""
        stroke = stroke_for_duration(0.6, 0.99)
        assert stroke.mu == pytest.approx(math.log(0.6) - 1.0)
        assert lognormal_cdf(0.6, 0.0, stroke.mu, stroke.sigma) == pytest.approx(0.99, abs=1e-9)

    @pytest.mark.parametrize('r', [0.5, 1.0, 0.3])
    def test_r_target_range(self, r):
        with pytest.raises(ValidationError):
            solve_sigma(2.0, r)


class TestTrapezoid:
    def test_hand_computed_case(self):
        """0.75 mm / 2 s / 1 mm/s² → t_acc 0.5 s，匀速 1 s，v_max 0.5 mm/s"""
        tz = trapezoid_times(0.75, 2.0, 1.0)
        assert tz.t_acc == pytest.approx(0.5)
        assert tz.t_const == pytest.approx(1.0)
        assert tz.v_max == pytest.approx(0.5)

    def test_displacement_identity_random(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            d = rng.uniform(0.1, 500.0)
            total = rng.uniform(0.2, 10.0)
            accel = 4 * d / total ** 2 * rng.uniform(1.0001, 20.0)
            tz = trapezoid_times(d, total, accel)
            assert tz.total_time == pytest.approx(total, rel=1e-12)
            assert tz.distance == pytest.approx(d, rel=1e-9)
            assert trapezoid_distance(total, tz) == pytest.approx(d, rel=1e-9)

    def test_infeasible(self):
        with pytest.raises(Infeasible):
            trapezoid_times(100.0, 2.0, 99.0)  # 需要 ≥ 100 mm/s²

    def test_triangular_limit(self):
        """加速度恰好为 4d/T² 时退化为三角形"""
        tz = trapezoid_times(100.0, 2.0, 100.0)
        assert tz.t_const == pytest.approx(0.0, abs=1e-12)
        assert tz.t_acc == pytest.approx(1.0)

    def test_phase_boundaries_continuous(self):
        tz = trapezoid_times(0.75, 2.0, 1.0)
        eps = 1e-12
        for boundary in (tz.t_acc, tz.t_acc + tz.t_const):
            left = trapezoid_speed(boundary - eps, tz)
            right = trapezoid_speed(boundary + eps, tz)
            assert abs(left - right) < 1e-9
        assert trapezoid_speed(0.0, tz) == 0.0
        assert trapezoid_speed(2.0, tz) == 0.0
        assert trapezoid_speed(1.0, tz) == pytest.approx(0.5)

    def test_mid_time_is_path_midpoint(self):
        """匀速段中点时刻恰好走到线段中点"""
        seg = SegmentSpec((350, -50, 450), (350, 50, 450), 2.0, TRAPEZOIDAL)
        tz = trapezoid_times(seg.length, 2.0, 150.0)
        p = trapezoid_position(tz.t_acc + tz.t_const / 2, seg, tz)
        assert np.allclose(p, [350, 0, 450], atol=1e-9)

    def test_position_monotonic_and_ends(self):
        seg = SegmentSpec((10, 0, 0), (0, 20, 0), 2.0, TRAPEZOIDAL)
        tz = trapezoid_times(seg.length, 2.0, seg.length)
        p = trapezoid_position(np.linspace(0, 2, 201), seg, tz)
        assert np.all(np.diff(p[:, 0]) <= 0)
        assert np.all(np.diff(p[:, 1]) >= 0)
        assert np.allclose(p[-1], [0, 20, 0], atol=1e-12)


def _square_segments(kind=LOGNORMAL, duration=2.0):
    v = [(350, -50, 450), (350, 50, 450), (350, 50, 550), (350, -50, 550)]
    return [SegmentSpec(v[k], v[(k + 1) % 4], duration, kind) for k in range(4)]


class TestSuperpose:
    def test_sample_count_and_endpoints(self):
        path = superpose_strokes(_square_segments(), 0.0, LOGNORMAL, 0.024)
        assert len(path) == 334  # floor(8 / 0.024) + 1
        assert path.t[-1] == pytest.approx(333 * 0.024)
        assert path.start.tolist() == [350, -50, 450]
        assert path.end.tolist() == [350, -50, 450]

    def test_edge_endpoint_within_one_percent(self):
        """r = 0.99：每笔在其终止时刻已完成 ≥ 99%"""
        plans = plan_strokes(_square_segments(), 0.0, LOGNORMAL, r_target=0.99)
        for plan in plans:
            assert float(plan.progress(plan.end)) == pytest.approx(0.99, abs=1e-9)

    def test_overlap_shifts_activation(self):
        plans = plan_strokes(_square_segments(), 0.2, LOGNORMAL)
        starts = [p.start for p in plans]
        assert starts == pytest.approx([0.0, 1.6, 3.2, 4.8])

    def test_trapezoid_three_phases_per_edge(self):
        """默认加速段占 1/4：100 mm / 2 s 的边巡航速度 100/1.5 mm/s"""
        path = superpose_strokes(_square_segments(TRAPEZOIDAL), 0.0, TRAPEZOIDAL, 0.024)
        speed = numeric_speed(path)
        for edge in range(4):
            mid = int(round((edge * 2.0 + 1.0) / 0.024))
            assert speed[mid] == pytest.approx(100.0 / 1.5, rel=1e-9)
        assert speed[0] < 5.0

    def test_collinear_strokes_add_up(self):
        """两段共线等长、无重叠：总位移 2Δ，速度呈两个分开的脉冲"""
        segs = [SegmentSpec((0, 0, 0), (100, 0, 0), 2.0), SegmentSpec((100, 0, 0), (200, 0, 0), 2.0)]
        path = superpose_strokes(segs, 0.0, LOGNORMAL, 0.01)
        assert path.end.tolist() == [200, 0, 0]
        speed = numeric_speed(path)
        assert trapezoid(speed, path.t) == pytest.approx(200.0, abs=1e-6)

        first, second = speed[path.t < 2.0].max(), speed[path.t > 2.0].max()
        valley = speed[(path.t > 1.9) & (path.t < 2.1)].min()
        assert first == pytest.approx(second, rel=0.05)
        assert valley < 0.1 * min(first, second)

    def test_corner_rounding_grows_with_overlap(self):
        """拐角处最近距离随重叠比例单调增大，有重叠时不经过顶点"""
        corner = np.array([350.0, 50.0, 450.0])
        distances = []
        for overlap in (0.0, 0.1, 0.2, 0.3, 0.4):
            path = superpose_strokes(_square_segments(), overlap, LOGNORMAL, 0.005)
            distances.append(float(np.linalg.norm(path.p - corner, axis=1).min()))
        assert all(b > a for a, b in zip(distances, distances[1:]))
        assert distances[1] > 0.0

    def test_pause_holds_position(self):
        segs = _square_segments(TRAPEZOIDAL)
        path = superpose_strokes(segs, 0.0, TRAPEZOIDAL, 0.02, pause=[0.0, 1.0, 0.0])
        assert path.t[-1] == pytest.approx(9.0)
        # 第二笔结束（4 s）到第三笔启动（5 s）之间停在第三个顶点
        hold = (path.t > 4.01) & (path.t < 4.99)
        assert np.allclose(path.p[hold], [350, 50, 550], atol=1e-9)

    def test_pause_length_checked(self):
        with pytest.raises(ValidationError, match='pause'):
            plan_strokes(_square_segments(), 0.0, LOGNORMAL, pause=[1.0])

    @pytest.mark.parametrize('overlap', [-0.1, 0.5, 0.9])
    def test_overlap_range(self, overlap):
        with pytest.raises(ValidationError, match='overlap'):
            plan_strokes(_square_segments(), overlap, LOGNORMAL)

    def test_disconnected_polyline(self):
        segs = [SegmentSpec((0, 0, 0), (1, 0, 0), 1.0), SegmentSpec((2, 0, 0), (3, 0, 0), 1.0)]
        with pytest.raises(DisconnectedPolyline) as info:
            superpose_strokes(segs, 0.0, LOGNORMAL, 0.024)
        assert info.value.index == 0

    def test_zero_length_segment_rejected(self):
        with pytest.raises(ValidationError):
            SegmentSpec((1, 2, 3), (1, 2, 3), 1.0)

    def test_accel_clamped_to_model_limit(self, caplog):
        plans = plan_strokes(_square_segments(TRAPEZOIDAL), 0.0, TRAPEZOIDAL, accel=1000.0, accel_limit=200.0)
        assert all(p.trapezoid.accel == 200.0 for p in plans)
        assert '超过模型上限' in caplog.text

    def test_clamped_accel_can_be_infeasible(self):
        with pytest.raises(Infeasible):
            plan_strokes(_square_segments(TRAPEZOIDAL), 0.0, TRAPEZOIDAL, accel=1000.0, accel_limit=50.0)

    def test_unknown_profile(self):
        with pytest.raises(ValidationError, match='profile'):
            superpose_strokes(_square_segments(), 0.0, 'cubic', 0.024)
