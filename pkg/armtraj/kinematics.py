"""运动学模块

负责位姿代数与基于 DH 参数的正运动学，包括：
- 旋转矩阵 / 齐次变换矩阵（不可变值对象，构造时校验不变量）
- 单连杆 DH 变换与六连杆串联组合
- 机器人模型（DH 表 + 连杆长度 + 关节限位 + 工具速度/加速度上限）

角度内部一律用弧度；度数只在配置文件 / 命令行边界换算。
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ValidationError

# 正交性校验容差
ORTHO_TOL = 1e-9

# 关节数（前三轴定位，后三轴定姿）
N_JOINTS = 6

_BOTTOM_ROW = np.array([0.0, 0.0, 0.0, 1.0])


def _frozen(a: np.ndarray) -> np.ndarray:
    """返回只读副本，值对象内部数组不允许原地修改"""
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def _rotation_defect(m: np.ndarray) -> Optional[str]:
    """检查 3×3 矩阵是否为旋转矩阵，返回第一条不满足的原因（满足时为 None）"""
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return "需要有限值的 3×3 矩阵"
    norms = np.linalg.norm(m, axis=0)
    if np.any(np.abs(norms - 1.0) > ORTHO_TOL):
        return f"列向量不是单位向量（模长 {norms.round(12).tolist()}）"
    gram = m.T @ m
    off = gram - np.diag(np.diag(gram))
    if np.any(np.abs(off) > ORTHO_TOL):
        return "列向量不两两正交"
    det = np.linalg.det(m)
    if abs(det - 1.0) > ORTHO_TOL:
        return f"行列式应为 +1，实际 {det:.12g}"
    return None


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    """旋转矩阵：三列依次为活动坐标系单位向量 n、o、a 在固定坐标系下的表示"""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        reason = _rotation_defect(m)
        if reason:
            raise ValidationError('rotation', reason)
        object.__setattr__(self, 'matrix', m)

    @classmethod
    def identity(cls) -> 'RotationMatrix':
        return cls(np.eye(3))

    @classmethod
    def from_columns(cls, n: Sequence[float], o: Sequence[float], a: Sequence[float]) -> 'RotationMatrix':
        return cls(np.column_stack([n, o, a]))

    @classmethod
    def nearest(cls, m: np.ndarray) -> 'RotationMatrix':
        """把近似旋转矩阵投影到最近的旋转矩阵（SVD）

        只在用户显式要求时调用；构造函数从不静默修复，录入错误应当暴露出来。
        """
        u, _, vt = np.linalg.svd(np.asarray(m, dtype=float))
        d = np.sign(np.linalg.det(u @ vt))
        return cls(u @ np.diag([1.0, 1.0, d]) @ vt)

    @property
    def n(self) -> np.ndarray:
        return self.matrix[:, 0]

    @property
    def o(self) -> np.ndarray:
        return self.matrix[:, 1]

    @property
    def a(self) -> np.ndarray:
        return self.matrix[:, 2]

    def allclose(self, other: 'RotationMatrix', atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))


@dataclass(frozen=True, eq=False)
class HomogeneousTransform:
    """齐次变换矩阵 T = [[R, p], [f, w]]，机器人学中 f 恒为零向量、w 恒为 1"""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        if m.shape != (4, 4) or not np.all(np.isfinite(m)):
            raise ValidationError('transform', "需要有限值的 4×4 矩阵")
        if not np.array_equal(m[3], _BOTTOM_ROW):
            raise ValidationError('transform', f"末行应为 (0, 0, 0, 1)，实际 {m[3].tolist()}")
        reason = _rotation_defect(m[:3, :3])
        if reason:
            raise ValidationError('transform.rotation', reason)
        object.__setattr__(self, 'matrix', m)

    @classmethod
    def identity(cls) -> 'HomogeneousTransform':
        return cls(np.eye(4))

    @classmethod
    def from_parts(cls, rotation: RotationMatrix, position: Sequence[float]) -> 'HomogeneousTransform':
        m = np.eye(4)
        m[:3, :3] = rotation.matrix
        m[:3, 3] = position
        return cls(m)

    @property
    def rotation(self) -> RotationMatrix:
        return RotationMatrix(self.matrix[:3, :3])

    @property
    def position(self) -> np.ndarray:
        return self.matrix[:3, 3]

    @property
    def perspective(self) -> np.ndarray:
        return self.matrix[3, :3]

    @property
    def scale(self) -> float:
        return float(self.matrix[3, 3])

    def inverse(self) -> 'HomogeneousTransform':
        """刚体逆变换：(Rᵀ, −Rᵀp)"""
        r = self.matrix[:3, :3]
        m = np.eye(4)
        m[:3, :3] = r.T
        m[:3, 3] = -r.T @ self.matrix[:3, 3]
        return HomogeneousTransform(m)

    def allclose(self, other: 'HomogeneousTransform', atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))


@dataclass(frozen=True)
class DHRow:
    """DH 参数表的一行：θ_k = q_k + theta_offset，d/a 单位 mm，α 单位 rad"""

    theta_offset: float
    d: float
    a: float
    alpha: float

    def __post_init__(self) -> None:
        for name in ('theta_offset', 'd', 'a', 'alpha'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(name, f"必须为有限值，实际 {value!r}")
            object.__setattr__(self, name, value)
        if abs(self.alpha) > math.pi + 1e-12:
            raise ValidationError('alpha', f"应在 [−π, π] 内，实际 {self.alpha:g}")


@dataclass(frozen=True)
class JointConfig:
    """六个关节角（rad），q13 定位、q46 定姿；validated 表示已按模型限位校验"""

    q: Tuple[float, ...]
    validated: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        q = tuple(float(v) for v in self.q)
        if len(q) != N_JOINTS:
            raise ValidationError('q', f"需要 {N_JOINTS} 个关节角，实际 {len(q)} 个")
        if not all(math.isfinite(v) for v in q):
            raise ValidationError('q', "关节角必须为有限值")
        object.__setattr__(self, 'q', q)

    @classmethod
    def from_parts(cls, q13: Sequence[float], q46: Sequence[float]) -> 'JointConfig':
        return cls(tuple(q13) + tuple(q46))

    @property
    def q13(self) -> Tuple[float, float, float]:
        return self.q[:3]

    @property
    def q46(self) -> Tuple[float, float, float]:
        return self.q[3:]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.q)

    def validated_for(self, model: 'RobotModel') -> 'JointConfig':
        """按模型关节限位校验，通过后返回 validated=True 的副本"""
        for k, (value, (lo, hi)) in enumerate(zip(self.q, model.joint_limits)):
            if not lo <= value <= hi:
                raise ValidationError(
                    f"q{k + 1}", f"{value:.6g} rad 超出限位 [{lo:.6g}, {hi:.6g}]"
                )
        return replace(self, validated=True)


# 关节限位缺省值：每轴 (−π, π)
DEFAULT_LIMITS = tuple((-math.pi, math.pi) for _ in range(N_JOINTS))


@dataclass(frozen=True)
class RobotModel:
    """机器人模型：6 行 DH 参数 + 连杆长度 L1…L5 + 关节限位 + 工具速度/加速度上限"""

    rows: Tuple[DHRow, ...]
    link_lengths: Tuple[float, ...] = ()
    joint_limits: Tuple[Tuple[float, float], ...] = DEFAULT_LIMITS
    max_tool_speed: float = 1000.0
    max_tool_accel: float = 5000.0
    model_id: str = 'robot'

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        if len(rows) != N_JOINTS:
            raise ValidationError('rows', f"需要 {N_JOINTS} 行，实际 {len(rows)} 行")
        limits = tuple((float(lo), float(hi)) for lo, hi in self.joint_limits)
        if len(limits) != N_JOINTS:
            raise ValidationError('joint_limits', f"需要 {N_JOINTS} 组限位，实际 {len(limits)} 组")
        for k, (lo, hi) in enumerate(limits):
            if not lo < hi:
                raise ValidationError(f"joint_limits[{k}]", f"要求 min < max，实际 ({lo:g}, {hi:g})")
        if not self.max_tool_speed > 0:
            raise ValidationError('max_tool_speed', "必须 > 0")
        if not self.max_tool_accel > 0:
            raise ValidationError('max_tool_accel', "必须 > 0")
        object.__setattr__(self, 'rows', rows)
        object.__setattr__(self, 'link_lengths', tuple(float(v) for v in self.link_lengths))
        object.__setattr__(self, 'joint_limits', limits)

    @classmethod
    def table1(
        cls,
        lengths: Sequence[float],
        joint_limits: Optional[Sequence[Tuple[float, float]]] = None,
        max_tool_speed: float = 1000.0,
        max_tool_accel: float = 5000.0,
        model_id: str = 'table1',
    ) -> 'RobotModel':
        """按 DH 参数表实例化 PUMA 类六轴臂（L1…L5 为连杆长度）"""
        if len(lengths) != 5:
            raise ValidationError('link_lengths', f"需要 L1…L5 共 5 个，实际 {len(lengths)} 个")
        l1, l2, l3, l4, l5 = (float(v) for v in lengths)
        half = math.pi / 2
        rows = (
            DHRow(0.0, l1, 0.0, -half),
            DHRow(-half, 0.0, l2, 0.0),
            DHRow(0.0, 0.0, l3, -half),
            DHRow(0.0, l4, 0.0, half),
            DHRow(0.0, 0.0, 0.0, -half),
            DHRow(math.pi, l5, 0.0, 0.0),
        )
        return cls(
            rows=rows,
            link_lengths=(l1, l2, l3, l4, l5),
            joint_limits=tuple(joint_limits) if joint_limits else DEFAULT_LIMITS,
            max_tool_speed=max_tool_speed,
            max_tool_accel=max_tool_accel,
            model_id=model_id,
        )

    @property
    def reach(self) -> float:
        """工作空间外接球半径（以基座原点为心）：各行 |d| + |a| 之和"""
        return sum(abs(r.d) + abs(r.a) for r in self.rows)


JointLike = Union[JointConfig, Sequence[float], np.ndarray]


def _as_angles(q: JointLike) -> np.ndarray:
    return np.asarray(q.q if isinstance(q, JointConfig) else q, dtype=float)


def rotate_to_fixed(rotation: RotationMatrix, r_mobile: Sequence[float]) -> np.ndarray:
    """活动坐标系中的向量换算到固定坐标系：r = R · r_mobile"""
    return rotation.matrix @ np.asarray(r_mobile, dtype=float)


def compose(t_a: HomogeneousTransform, t_b: HomogeneousTransform) -> HomogeneousTransform:
    """齐次变换组合（4×4 矩阵乘积）"""
    return HomogeneousTransform(t_a.matrix @ t_b.matrix)


def _dh_matrix(theta: float, d: float, a: float, alpha: float) -> np.ndarray:
    """Rot_z(θ) · Trans_z(d) · Trans_x(a) · Rot_x(α)"""
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array([
        [ct, -ca * st, sa * st, a * ct],
        [st, ca * ct, -sa * ct, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def dh_link_transform(row: DHRow, q_k: float) -> HomogeneousTransform:
    """第 k 行 DH 参数对应的相邻坐标系变换 ^{k-1}T_k"""
    return HomogeneousTransform(_dh_matrix(q_k + row.theta_offset, row.d, row.a, row.alpha))


def _chain(model: RobotModel, q: np.ndarray) -> np.ndarray:
    """按 ^0T_1 ^1T_2 … ^5T_6 顺序左乘累积，返回原始 4×4 数组（逆解热路径不做校验）"""
    t = np.eye(4)
    for row, q_k in zip(model.rows, q):
        t = t @ _dh_matrix(q_k + row.theta_offset, row.d, row.a, row.alpha)
    return t


def forward_kinematics(model: RobotModel, q: JointLike) -> HomogeneousTransform:
    """正运动学：关节角 → 工具相对基座的位姿 ^0T_6"""
    return HomogeneousTransform(_chain(model, _as_angles(q)))


def forward_kinematics_chain(model: RobotModel, q: JointLike) -> List[HomogeneousTransform]:
    """返回 {s0}…{s6} 共七个坐标系相对基座的位姿"""
    angles = _as_angles(q)
    frames = [HomogeneousTransform.identity()]
    t = np.eye(4)
    for row, q_k in zip(model.rows, angles):
        t = t @ _dh_matrix(q_k + row.theta_offset, row.d, row.a, row.alpha)
        frames.append(HomogeneousTransform(t))
    return frames


def tool_position(model: RobotModel, q: JointLike) -> np.ndarray:
    """工具位置 p_c = ^0T_6(1:3, 4)"""
    return _chain(model, _as_angles(q))[:3, 3]
