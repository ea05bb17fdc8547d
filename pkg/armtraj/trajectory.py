"""轨迹规划模块

负责把折线图形组装成机器人可执行的运动，包括：
- 图形定义（顶点、是否闭合、各边时长、可选加速度与腕部姿态）
- 图形 → 笛卡尔轨迹（对数正态 / 梯形速度）
- 重复执行（两次之间停顿）
- 笛卡尔轨迹 → 关节轨迹（逐点热启动逆解）
- 数值速度与路径长度
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import config
from .errors import ValidationError
from .ik_solver import solve_path_ik
from .kinematics import RobotModel
from .logger import logger
from .paths import JointTrajectory, TimedPath, stack_points
from .profiles import (
    LOGNORMAL,
    VERTEX_TOL,
    SegmentSpec,
    check_profile_kind,
    superpose_strokes,
)


@dataclass(frozen=True, eq=False)
class FigureSpec:
    """折线图形

    segment_duration 为每条边的时长；也可只给 total_duration，按边长比例分配。
    闭合图形自动补上回到第一个顶点的边。
    """

    name: str
    vertices: np.ndarray
    closed: bool = True
    segment_duration: Optional[float] = None
    total_duration: Optional[float] = None
    accel: Optional[float] = None
    q46: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        vertices = stack_points(self.vertices)
        if len(vertices) < 2:
            raise ValidationError('vertices', f"至少需要 2 个顶点，实际 {len(vertices)} 个")
        if not np.all(np.isfinite(vertices)):
            raise ValidationError('vertices', "顶点坐标必须为有限值")
        vertices.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)

        if (self.segment_duration is None) == (self.total_duration is None):
            raise ValidationError('duration', "segment_duration 与 total_duration 必须且只能给一个")
        duration = self.segment_duration if self.segment_duration is not None else self.total_duration
        if not (math.isfinite(duration) and duration > 0):
            raise ValidationError('duration', f"必须为正的有限值，实际 {duration!r}")
        if self.accel is not None and not self.accel > 0:
            raise ValidationError('accel', f"必须 > 0，实际 {self.accel!r}")
        if self.closed and len(vertices) < 3:
            raise ValidationError('closed', "闭合图形至少需要 3 个顶点")

        for k, (a, b) in enumerate(self.edges):
            if np.allclose(a, b, rtol=0.0, atol=VERTEX_TOL):
                raise ValidationError(f"vertices[{k}]", "相邻顶点重合")

        object.__setattr__(self, 'q46', tuple(float(v) for v in self.q46))
        object.__setattr__(self, 'seed', tuple(float(v) for v in self.seed))
        if len(self.q46) != 3 or len(self.seed) != 3:
            raise ValidationError('q46', "腕部角与种子各需 3 个分量")

    @property
    def edges(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        v = self.vertices
        pairs = [(v[k], v[k + 1]) for k in range(len(v) - 1)]
        if self.closed:
            pairs.append((v[-1], v[0]))
        return pairs

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.array([np.linalg.norm(b - a) for a, b in self.edges])

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    def durations(self) -> List[float]:
        if self.segment_duration is not None:
            return [float(self.segment_duration)] * len(self.edges)
        lengths = self.edge_lengths
        return (self.total_duration * lengths / lengths.sum()).tolist()

    def segments(self, kind: str = LOGNORMAL) -> List[SegmentSpec]:
        return [
            SegmentSpec(a, b, t_e, kind)
            for (a, b), t_e in zip(self.edges, self.durations())
        ]


def _resolve(value, default):
    return default if value is None else value


def plan_figure(
    figure: FigureSpec,
    kind: str = LOGNORMAL,
    overlap: Optional[float] = None,
    sample_period: Optional[float] = None,
    r_target: Optional[float] = None,
    accel: Optional[float] = None,
    pause: float = 0.0,
    model: Optional[RobotModel] = None,
) -> TimedPath:
    """图形 → 笛卡尔轨迹

    Args:
        figure: 图形
        kind: lognormal / trapezoidal
        overlap: 笔画重叠比例，缺省取 config.overlap
        sample_period: 采样周期（s），缺省取 config.sample_period
        r_target: 对数正态终点比例，缺省取 config.r_target
        accel: 梯形加速度（mm/s²），缺省取图形自带值
        pause: 相邻两笔之间的停顿（s）
        model: 给出时按模型的工具速度 / 加速度上限检查

    Returns:
        从第一个顶点出发的 TimedPath
    """
    check_profile_kind(kind)
    path = superpose_strokes(
        figure.segments(kind),
        _resolve(overlap, config.overlap),
        kind,
        _resolve(sample_period, config.sample_period),
        r_target=_resolve(r_target, config.r_target),
        pause=pause,
        accel=_resolve(accel, figure.accel),
        accel_limit=model.max_tool_accel if model else None,
        speed_limit=model.max_tool_speed if model else None,
    )
    logger.debug(f"图形 {figure.name} 规划完成（{kind}）: {len(path)} 个采样点，时长 {path.duration:.3f} s")
    return path


def repeat_figure(
    figure: FigureSpec,
    kind: str = LOGNORMAL,
    repetitions: int = 3,
    pause: float = 1.0,
    overlap: Optional[float] = None,
    sample_period: Optional[float] = None,
    r_target: Optional[float] = None,
    accel: Optional[float] = None,
    model: Optional[RobotModel] = None,
) -> TimedPath:
    """闭合图形连续执行 repetitions 次，每两次之间停顿 pause 秒，合成一条轨迹"""
    if not figure.closed:
        raise ValidationError('closed', f"图形 {figure.name} 不闭合，无法重复执行")
    if int(repetitions) < 1:
        raise ValidationError('repetitions', f"必须 ≥ 1，实际 {repetitions!r}")
    if not pause >= 0:
        raise ValidationError('pause', f"必须 ≥ 0，实际 {pause!r}")
    check_profile_kind(kind)

    per_round = figure.segments(kind)
    segments = per_round * int(repetitions)
    gaps = ([0.0] * (len(per_round) - 1) + [pause]) * int(repetitions)
    return superpose_strokes(
        segments,
        _resolve(overlap, config.overlap),
        kind,
        _resolve(sample_period, config.sample_period),
        r_target=_resolve(r_target, config.r_target),
        pause=gaps[:-1],
        accel=_resolve(accel, figure.accel),
        accel_limit=model.max_tool_accel if model else None,
        speed_limit=model.max_tool_speed if model else None,
    )


def path_to_joints(
    model: RobotModel,
    path: TimedPath,
    q46: Sequence[float],
    seed0: Sequence[float],
    **kwargs,
) -> JointTrajectory:
    """腕部三轴固定为常值，逐点求前三轴（见 ik_solver.solve_path_ik）"""
    return solve_path_ik(model, path, q46, seed0, **kwargs)


def numeric_speed(path: TimedPath) -> np.ndarray:
    """位置向量中心差分（两端单侧差分）后取模，长度与采样点数相同"""
    if len(path) < 2:
        raise ValidationError('samples', "计算速度至少需要 2 个采样点")
    velocity = np.gradient(path.p, path.t, axis=0)
    return np.linalg.norm(velocity, axis=1)


def path_length(path: TimedPath) -> float:
    """折线弧长"""
    return float(np.linalg.norm(np.diff(path.p, axis=0), axis=1).sum())
