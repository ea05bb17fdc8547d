"""轨迹数据类型

- TimedPath: 等间隔采样的 (t, 笛卡尔点) 序列
- JointTrajectory: (t, 六关节角) 序列，机器人可直接执行

ik_solver / profiles / trajectory / verification 共用，单独成模块避免循环导入。
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import ValidationError
from .kinematics import RobotModel, tool_position

# 时间戳均匀性容差（s）
UNIFORM_TOL = 1e-9

POSITION_COLUMNS = ['px', 'py', 'pz']
JOINT_COLUMNS = [f'q{k}' for k in range(1, 7)]


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def _check_clock(t: np.ndarray, sample_period: float) -> None:
    if t.ndim != 1 or len(t) == 0:
        raise ValidationError('samples', "至少需要 1 个采样点")
    if not sample_period > 0:
        raise ValidationError('sample_period', f"必须 > 0，实际 {sample_period!r}")
    if not np.all(np.isfinite(t)):
        raise ValidationError('t', "时间戳必须为有限值")
    if len(t) > 1:
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ValidationError('t', f"时间戳必须严格递增（第 {int(np.argmin(dt)) + 1} 个样本）")
        # 按绝对时间校验均匀性：t_i 与 t_0 + i·T 的偏差
        drift = np.abs(t - (t[0] + np.arange(len(t)) * sample_period))
        if np.any(drift > UNIFORM_TOL):
            raise ValidationError('t', f"时间戳不均匀（采样周期 {sample_period:g} s）")


@dataclass(frozen=True, eq=False)
class TimedPath:
    """笛卡尔轨迹：t 形状 (n,)，p 形状 (n, 3)，单位 s / mm"""

    t: np.ndarray
    p: np.ndarray
    sample_period: float

    def __post_init__(self) -> None:
        t = _readonly(self.t)
        p = _readonly(self.p)
        if p.ndim != 2 or p.shape[1] != 3 or p.shape[0] != t.shape[0]:
            raise ValidationError('p', f"位置数组形状应为 ({t.shape[0]}, 3)，实际 {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValidationError('p', "位置必须为有限值")
        _check_clock(t, float(self.sample_period))
        object.__setattr__(self, 't', t)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'sample_period', float(self.sample_period))

    @classmethod
    def uniform(cls, start: float, sample_period: float, points: np.ndarray) -> 'TimedPath':
        """按起始时刻 + 周期生成时间戳"""
        points = np.asarray(points, dtype=float)
        t = start + np.arange(len(points)) * sample_period
        return cls(t, points, sample_period)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def start(self) -> np.ndarray:
        return self.p[0]

    @property
    def end(self) -> np.ndarray:
        return self.p[-1]

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.p, columns=POSITION_COLUMNS)
        df.insert(0, 't', self.t)
        return df


@dataclass(frozen=True, eq=False)
class JointTrajectory:
    """关节轨迹：与生成它的 TimedPath 同时间戳；q 形状 (n, 6)

    evals 记录每个采样点逆解的函数评估次数，discontinuities 记录疑似换枝的采样下标。
    """

    t: np.ndarray
    q: np.ndarray
    model_id: str
    sample_period: float
    evals: Tuple[int, ...] = ()
    discontinuities: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        t = _readonly(self.t)
        q = _readonly(self.q)
        if q.ndim != 2 or q.shape != (t.shape[0], 6):
            raise ValidationError('q', f"关节数组形状应为 ({t.shape[0]}, 6)，实际 {q.shape}")
        _check_clock(t, float(self.sample_period))
        object.__setattr__(self, 't', t)
        object.__setattr__(self, 'q', q)

    def __len__(self) -> int:
        return len(self.t)

    def tool_path(self, model: RobotModel) -> TimedPath:
        """逐点正运动学还原工具轨迹"""
        points = np.array([tool_position(model, row) for row in self.q])
        return TimedPath(self.t, points, self.sample_period)

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.q, columns=JOINT_COLUMNS)
        df.insert(0, 't', self.t)
        return df


def stack_points(points: Sequence[Sequence[float]]) -> np.ndarray:
    """把若干 3 维点整理成 (n, 3) 数组，形状不符时报校验错误"""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError('points', f"需要 (n, 3) 的点序列，实际形状 {arr.shape}")
    return arr
