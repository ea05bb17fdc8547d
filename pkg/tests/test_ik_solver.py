"""单纯形最小化与腕部冻结逆解测试"""

import math

import numpy as np
import pytest

from armtraj.errors import BudgetExhausted, Unreachable, ValidationError
from armtraj.ik_solver import (
    IKRequest,
    minimize_simplex,
    position_error,
    solve_path_ik,
    solve_paths_ik,
    solve_position_ik,
)
from armtraj.kinematics import RobotModel, tool_position
from armtraj.paths import TimedPath


def _bowl(x):
    return float(np.sum((np.asarray(x) - np.array([1.0, -2.0, 0.5])) ** 2))


class TestMinimizeSimplex:
    def test_finds_quadratic_minimum(self):
        result = minimize_simplex(_bowl, [0.0, 0.0, 0.0], step=0.5)
        assert result.converged and not result.exhausted
        assert np.allclose(result.x, [1.0, -2.0, 0.5], atol=1e-6)

    def test_never_worse_than_seed(self):
        seed = [3.0, 3.0, 3.0]
        result = minimize_simplex(_bowl, seed, max_evals=7)
        assert result.fun <= _bowl(seed)
        assert result.evals == 7

    def test_f_target_stops_at_seed(self):
        """种子即为解时 1 次评估就返回"""
        result = minimize_simplex(_bowl, [1.0, -2.0, 0.5], f_target=1e-12)
        assert result.evals == 1
        assert result.converged

    def test_budget_exhausted_raises_when_asked(self):
        with pytest.raises(BudgetExhausted) as info:
            minimize_simplex(_bowl, [50.0, 50.0, 50.0], max_evals=10, raise_on_budget=True)
        assert info.value.result.evals == 10
        assert info.value.result.fun <= _bowl([50.0, 50.0, 50.0])

    def test_nan_treated_as_worst(self):
        def f(x):
            return math.nan if x[0] < 0 else _bowl(x)

        result = minimize_simplex(f, [0.2, 0.0, 0.0])
        assert np.isfinite(result.fun)
        assert result.x[0] >= 0

    def test_constant_function_returns_seed(self):
        result = minimize_simplex(lambda x: 3.0, [0.1, 0.2, 0.3])
        assert result.converged
        assert result.fun == 3.0
        assert result.x.tolist() == [0.1, 0.2, 0.3]

    def test_rosenbrock_from_near_minimum(self):
        def rosen(x):
            return float(sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))

        result = minimize_simplex(rosen, [0.9, 0.8, 0.7], max_evals=5000)
        assert result.converged
        assert result.fun < 1e-8

    def test_zero_budget_rejected(self):
        with pytest.raises(ValidationError):
            minimize_simplex(_bowl, [0.0], max_evals=0)


class TestPositionIK:
    def test_random_round_trip(self, sample_model):
        """100 个正解生成的目标点：全部收敛，FK 回代误差 < 1e-3 mm，评估次数中位数 < 500"""
        rng = np.random.default_rng(20240601)
        evals = []
        for _ in range(100):
            q13 = rng.uniform([-1.0, -0.6, -0.6], [1.0, 0.6, 0.6])
            q46 = rng.uniform(-0.5, 0.5, 3)
            target = tool_position(sample_model, np.concatenate([q13, q46]))
            seed = q13 + rng.uniform(-0.2, 0.2, 3)
            sol = solve_position_ik(sample_model, IKRequest(tuple(target), tuple(q46), tuple(seed)))
            assert sol.converged
            reached = tool_position(sample_model, sol.joints)
            assert np.linalg.norm(reached - target) < 1e-3
            evals.append(sol.evals_used)
        assert np.median(evals) < 500

    def test_seed_at_solution_returns_immediately(self, sample_model):
        q = [0.3, -0.2, 0.4, 0.1, 0.2, 0.3]
        target = tuple(tool_position(sample_model, q))
        sol = solve_position_ik(sample_model, IKRequest(target, tuple(q[3:]), tuple(q[:3])))
        assert sol.evals_used == 1
        assert sol.residual == pytest.approx(0.0, abs=1e-20)
        assert sol.q46 == tuple(q[3:])

    def test_far_target_unreachable(self, sample_model):
        with pytest.raises(Unreachable):
            solve_position_ik(sample_model, IKRequest((5000.0, 0.0, 0.0), (0, 0, 0), (0, 0, 0)))

    def test_target_outside_joint_limits_unreachable(self, sample_model):
        """目标需要 q1 = 1 rad，而 q1 限位只有 ±0.1 rad"""
        limits = ((-0.1, 0.1),) + sample_model.joint_limits[1:]
        tight = RobotModel.table1(sample_model.link_lengths, joint_limits=limits)
        target = tuple(tool_position(tight, [1.0, 0.2, 0.1, 0, 0, 0]))
        with pytest.raises(Unreachable):
            solve_position_ik(tight, IKRequest(target, (0, 0, 0), (0, 0, 0)))

    def test_budget_exhausted_carries_best_result(self, sample_model):
        target = tuple(tool_position(sample_model, [0.8, 0.4, -0.3, 0, 0, 0]))
        with pytest.raises(BudgetExhausted) as info:
            solve_position_ik(sample_model, IKRequest(target, (0, 0, 0), (0, 0, 0), max_evals=5))
        assert info.value.result.evals_used == 5

    def test_position_error_is_squared_distance(self, sample_model):
        assert position_error((0, 0, 0), (0, 0, 0), (374.0, 0.0, 633.0), sample_model) == pytest.approx(9.0)

    @pytest.mark.parametrize('kwargs', [
        {'tolerance': 0.0},
        {'max_evals': 0},
        {'simplex_step': -1.0},
    ])
    def test_request_validation(self, kwargs):
        with pytest.raises(ValidationError):
            IKRequest((0, 0, 0), (0, 0, 0), (0, 0, 0), **kwargs)

    def test_wrist_outside_limits_refused(self, sample_model):
        """q5 限位 ±120°，冻结在 3 rad 时求解前就拒绝"""
        with pytest.raises(ValidationError, match='q5') as info:
            solve_position_ik(sample_model, IKRequest((350.0, 0.0, 500.0), (0.0, 3.0, 0.0), (0, 0, 0)))
        assert info.value.field == 'q46'

    def test_request_needs_triples(self):
        with pytest.raises(ValidationError, match='target'):
            IKRequest((0, 0), (0, 0, 0), (0, 0, 0))


def _segment(start, end, n=200, period=0.01) -> TimedPath:
    points = np.linspace(start, end, n)
    return TimedPath.uniform(0.0, period, points)


class TestPathIK:
    def test_warm_start_halves_evaluations(self, sample_model):
        """200 点直线：逐点热启动全部收敛，第 2 点起评估次数不到逐点冷启动的一半"""
        path = _segment((350.0, -10.0, 500.0), (350.0, 10.0, 500.0))
        traj = solve_path_ik(sample_model, path, (0, 0, 0), (0, 0, 0), progress=False)

        assert len(traj) == len(path)
        assert np.array_equal(traj.t, path.t)
        for q, target in zip(traj.q, path.p):
            assert np.linalg.norm(tool_position(sample_model, q) - target) < 1e-3

        cold = [
            solve_position_ik(sample_model, IKRequest(tuple(p), (0, 0, 0), (0, 0, 0))).evals_used
            for p in path.p[1:]
        ]
        assert np.mean(traj.evals[1:]) < 0.5 * np.mean(cold)
        assert traj.discontinuities == ()

    def test_unreachable_sample_index(self, sample_model):
        points = np.array([[350.0, 0.0, 500.0], [350.0, 0.0, 501.0], [5000.0, 0.0, 0.0]])
        path = TimedPath.uniform(0.0, 0.024, points)
        with pytest.raises(Unreachable) as info:
            solve_path_ik(sample_model, path, (0, 0, 0), (0, 0, 0), progress=False)
        assert info.value.index == 2

    def test_branch_jump_is_logged(self, sample_model, caplog):
        """max_step 设得极小时每一步都记为跳变"""
        path = _segment((350.0, -5.0, 500.0), (350.0, 5.0, 500.0), n=5)
        traj = solve_path_ik(sample_model, path, (0, 0, 0), (0, 0, 0), max_step=1e-9, progress=False)
        assert traj.discontinuities == (1, 2, 3, 4)
        assert '疑似换枝' in caplog.text

    def test_same_path_twice_is_bit_identical(self, sample_model):
        path = _segment((350.0, -5.0, 500.0), (350.0, 5.0, 500.0), n=20)
        a = solve_path_ik(sample_model, path, (0.1, 0.2, 0.3), (0, 0, 0), progress=False)
        b = solve_path_ik(sample_model, path, (0.1, 0.2, 0.3), (0, 0, 0), progress=False)
        assert np.array_equal(a.q, b.q)
        # 腕部角逐位等于输入
        assert np.all(a.q[:, 3:] == np.array([0.1, 0.2, 0.3]))

    def test_wrist_outside_limits_refused(self, sample_model):
        path = _segment((350.0, -5.0, 500.0), (350.0, 5.0, 500.0), n=5)
        with pytest.raises(ValidationError, match='q46'):
            solve_path_ik(sample_model, path, (0.0, 3.0, 0.0), (0, 0, 0), progress=False)

    def test_wrist_on_limit_accepted(self, sample_model):
        """腕部角正好在限位上：由正解生成的短直线照常逐点求解"""
        q5_max = sample_model.joint_limits[4][1]
        start = tool_position(sample_model, [0.2, 0.1, 0.1, 0.0, q5_max, 0.0])
        path = _segment(start, start + np.array([0.0, 2.0, 0.0]), n=5)
        traj = solve_path_ik(sample_model, path, (0.0, q5_max, 0.0), (0.2, 0.1, 0.1), progress=False)
        assert np.all(traj.q[:, 4] == q5_max)

    def test_parallel_paths_keep_order(self, sample_model):
        a = _segment((350.0, -5.0, 500.0), (350.0, 5.0, 500.0), n=10)
        b = _segment((300.0, 0.0, 450.0), (300.0, 0.0, 460.0), n=10)
        ja, jb = solve_paths_ik(sample_model, [a, b], (0, 0, 0), (0, 0, 0))
        assert np.allclose(ja.tool_path(sample_model).p, a.p, atol=1e-3)
        assert np.allclose(jb.tool_path(sample_model).p, b.p, atol=1e-3)
