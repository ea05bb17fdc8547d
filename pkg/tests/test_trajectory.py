"""图形规划、重复执行与关节轨迹测试"""

import numpy as np
import pytest

from armtraj.errors import Unreachable, ValidationError
from armtraj.kinematics import tool_position
from armtraj.paths import TimedPath
from armtraj.profiles import (
    LOGNORMAL,
    R_TARGET_TESTS,
    TRAPEZOIDAL,
    LognormalStroke,
    SegmentSpec,
    lognormal_position,
    lognormal_speed,
    solve_sigma,
)
from armtraj.trajectory import (
    FigureSpec,
    numeric_speed,
    path_length,
    path_to_joints,
    plan_figure,
    repeat_figure,
)

RECT = [(350, -50, 470), (350, 50, 470), (350, 50, 530), (350, -50, 530)]


class TestFigureSpec:
    def test_closed_figure_adds_return_edge(self, square):
        assert len(square.edges) == 4
        assert square.perimeter == pytest.approx(400.0)
        assert square.durations() == [2.0] * 4

    def test_total_duration_split_by_length(self):
        """100×60 矩形、总时长 6.4 s → 各边 2 / 1.2 / 2 / 1.2 s"""
        rect = FigureSpec('rect', RECT, total_duration=6.4)
        assert rect.durations() == pytest.approx([2.0, 1.2, 2.0, 1.2])

    def test_open_polyline(self):
        fig = FigureSpec('line', [(350, 0, 500), (350, 50, 500)], closed=False, segment_duration=1.5)
        assert len(fig.segments()) == 1

    @pytest.mark.parametrize('kwargs,field', [
        ({'segment_duration': 2.0, 'total_duration': 8.0}, 'duration'),
        ({}, 'duration'),
        ({'segment_duration': -1.0}, 'duration'),
        ({'segment_duration': 2.0, 'accel': 0.0}, 'accel'),
    ])
    def test_duration_and_accel_checked(self, kwargs, field):
        with pytest.raises(ValidationError) as info:
            FigureSpec('rect', RECT, **kwargs)
        assert info.value.field == field

    def test_repeated_vertex_rejected(self):
        with pytest.raises(ValidationError, match='相邻顶点重合'):
            FigureSpec('bad', [(0, 0, 0), (0, 0, 0), (1, 0, 0)], segment_duration=1.0)

    def test_closed_needs_three_vertices(self):
        with pytest.raises(ValidationError):
            FigureSpec('bad', [(0, 0, 0), (1, 0, 0)], segment_duration=1.0)


class TestPlanFigure:
    def test_square_lognormal(self, square):
        path = plan_figure(square, LOGNORMAL, overlap=0.0, sample_period=0.024, r_target=0.99)
        assert len(path) == 334
        assert path.start.tolist() == [350, -50, 450]
        assert path.end.tolist() == [350, -50, 450]
        # 平面图形：x 恒为 350
        assert np.allclose(path.p[:, 0], 350.0)

    def test_trapezoid_cruise_speed(self, square):
        path = plan_figure(square, TRAPEZOIDAL, overlap=0.0, sample_period=0.024)
        speed = numeric_speed(path)
        assert speed[42] == pytest.approx(100.0 / 1.5, rel=1e-9)

    def test_path_length_close_to_perimeter(self, square):
        """梯形曲线每笔都走完全程，折线弧长只在拐角处略短于周长"""
        path = plan_figure(square, TRAPEZOIDAL, overlap=0.0, sample_period=0.024)
        assert path_length(path) == pytest.approx(400.0, abs=0.05)

    def test_model_speed_limit_warns(self, square, sample_model, caplog):
        slow = type(sample_model)(
            rows=sample_model.rows,
            link_lengths=sample_model.link_lengths,
            joint_limits=sample_model.joint_limits,
            max_tool_speed=10.0,
        )
        plan_figure(square, TRAPEZOIDAL, sample_period=0.024, model=slow)
        assert '超过模型上限' in caplog.text


class TestRepeatFigure:
    def test_sample_count_and_pause(self, square):
        """三遍、间隔 1 s：总时长 26 s → 1084 个点，停顿期间停在起点"""
        path = repeat_figure(square, TRAPEZOIDAL, repetitions=3, pause=1.0, overlap=0.0, sample_period=0.024)
        assert len(path) == 1084
        hold = (path.t > 8.0) & (path.t < 9.0)
        assert hold.any()
        assert np.allclose(path.p[hold], [350, -50, 450], atol=1e-9)

    def test_single_repetition_matches_plan(self, square):
        once = repeat_figure(square, LOGNORMAL, repetitions=1, overlap=0.0, sample_period=0.024)
        plan = plan_figure(square, LOGNORMAL, overlap=0.0, sample_period=0.024)
        assert np.array_equal(once.p, plan.p)

    def test_open_figure_refused(self):
        fig = FigureSpec('line', [(350, 0, 500), (350, 50, 500)], closed=False, segment_duration=1.0)
        with pytest.raises(ValidationError, match='不闭合'):
            repeat_figure(fig)

    @pytest.mark.parametrize('repetitions', [0, -2])
    def test_repetitions_checked(self, square, repetitions):
        with pytest.raises(ValidationError) as info:
            repeat_figure(square, repetitions=repetitions)
        assert info.value.field == 'repetitions'


class TestPathToJoints:
    def test_joint_path_reproduces_tool_path(self, square, sample_model):
        path = plan_figure(square, LOGNORMAL, overlap=0.0, sample_period=0.5)
        joints = path_to_joints(sample_model, path, square.q46, square.seed, progress=False)
        assert len(joints) == len(path)
        assert joints.model_id == sample_model.model_id
        for q, target in zip(joints.q, path.p):
            assert np.linalg.norm(tool_position(sample_model, q) - target) < 1e-3
        assert np.all(joints.q[:, 3:] == 0.0)

    def test_still_path_gives_constant_joints(self, sample_model):
        path = TimedPath.uniform(0.0, 0.024, np.tile([350.0, 0.0, 500.0], (5, 1)))
        joints = path_to_joints(sample_model, path, (0, 0, 0), (0, 0, 0), progress=False)
        assert np.allclose(joints.q, joints.q[0], atol=1e-9)
        assert np.linalg.norm(tool_position(sample_model, joints.q[0]) - path.p[0]) < 1e-3

    def test_out_of_workspace_fails_at_first_sample(self, sample_model):
        path = TimedPath.uniform(0.0, 0.024, np.array([[5000.0, 0.0, 0.0], [5001.0, 0.0, 0.0]]))
        with pytest.raises(Unreachable) as info:
            path_to_joints(sample_model, path, (0, 0, 0), (0, 0, 0), progress=False)
        assert info.value.index == 0


def test_numeric_speed_of_uniform_motion():
    points = np.column_stack([np.arange(11) * 2.0, np.zeros(11), np.zeros(11)])
    path = TimedPath.uniform(0.0, 0.1, points)
    assert np.allclose(numeric_speed(path), 20.0)
    assert path_length(path) == pytest.approx(20.0)


def test_numeric_speed_of_still_path():
    path = TimedPath.uniform(0.0, 0.024, np.tile([350.0, 0.0, 500.0], (20, 1)))
    assert numeric_speed(path).tolist() == [0.0] * 20


def test_numeric_speed_second_order():
    """对数正态单笔：步长减半，内部点速度误差约降为 1/4"""
    seg = SegmentSpec((0, 0, 0), (100, 0, 0), 2.0)
    sigma = solve_sigma(2.0, R_TARGET_TESTS)
    stroke = LognormalStroke(0.0, 0.0, sigma, D=seg.length)

    def max_error(h):
        t = np.arange(0.0, 4.0 + h / 2, h)
        path = TimedPath.uniform(0.0, h, lognormal_position(t, seg, 0.0, 0.0, sigma))
        return np.abs(numeric_speed(path) - lognormal_speed(t, stroke))[1:-1].max()

    coarse, fine = max_error(0.02), max_error(0.01)
    assert fine < 0.3 * coarse
