"""速度曲线模块

负责直线运动的速度律与位置律，包括：
- 对数正态速度脉冲及其累积分布（进度律）
- 由运动时长反解 σ（闭式解 + 二分法校验）
- 梯形速度的相位时间、速度与位置
- 多段笔画按时间重叠叠加成一条等间隔采样的笛卡尔轨迹

时间单位 s，长度单位 mm。
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import bisect
from scipy.special import erf, erfinv

from .errors import DegenerateDuration, DisconnectedPolyline, Infeasible, ValidationError
from .logger import logger
from .paths import TimedPath

ArrayLike = Union[float, Sequence[float], np.ndarray]

LOGNORMAL = 'lognormal'
TRAPEZOIDAL = 'trapezoidal'
PROFILE_KINDS = (LOGNORMAL, TRAPEZOIDAL)

# 终点比例 r：测试用 0.99，σ 求解流程示例用 0.95
R_TARGET_TESTS = 0.99
R_TARGET_EXPOSITION = 0.95

# μ = ln(1)
DEFAULT_MU = 0.0

# 未指定加速度时，加速段占单段时长的比例
DEFAULT_RAMP_FRACTION = 0.25

# 顶点重合判定容差（mm）
VERTEX_TOL = 1e-9

# σ 闭式解回代误差超过该值时改用二分法
SIGMA_CHECK_TOL = 1e-9

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _out(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(name, f"必须为有限值，实际 {value!r}")
    return value


def check_profile_kind(kind: str) -> str:
    if kind not in PROFILE_KINDS:
        raise ValidationError('profile', f"应为 {' / '.join(PROFILE_KINDS)}，实际 {kind!r}")
    return kind


@dataclass(frozen=True)
class LognormalStroke:
    """对数正态笔画：t0 激活时刻，mu 对数时间延迟，sigma 对数响应时间，D 位移幅值（mm）"""

    t0: float
    mu: float
    sigma: float
    D: float = 1.0

    def __post_init__(self) -> None:
        for name in ('t0', 'mu', 'sigma', 'D'):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if not self.sigma > 0:
            raise ValidationError('sigma', f"必须 > 0，实际 {self.sigma:g}")
        if self.t0 < 0:
            raise ValidationError('t0', f"必须 ≥ 0，实际 {self.t0:g}")
        if self.D < 0:
            raise ValidationError('D', f"必须 ≥ 0，实际 {self.D:g}")

    @property
    def peak_time(self) -> float:
        """速度峰值时刻 t0 + exp(μ − σ²)"""
        return self.t0 + math.exp(self.mu - self.sigma ** 2)


@dataclass(frozen=True)
class TrapezoidSegment:
    """梯形速度：加速段 t_acc、匀速段 t_const、巡航速度 v_max、加速度 accel"""

    t_acc: float
    t_const: float
    v_max: float
    accel: float

    def __post_init__(self) -> None:
        if self.t_acc < 0 or self.t_const < 0:
            raise ValidationError('t_acc', "相位时长必须 ≥ 0")
        if abs(self.v_max - self.accel * self.t_acc) > 1e-9 * max(1.0, abs(self.v_max)):
            raise ValidationError('v_max', f"应等于 accel·t_acc = {self.accel * self.t_acc:g}")

    @property
    def total_time(self) -> float:
        return 2.0 * self.t_acc + self.t_const

    @property
    def distance(self) -> float:
        """梯形面积 v_max·(t_acc + t_const)"""
        return self.v_max * (self.t_acc + self.t_const)


@dataclass(frozen=True)
class SegmentSpec:
    """单段直线：起点 p_s、终点 p_e（mm）、指令时长 t_e（s）、速度曲线类型"""

    p_s: np.ndarray
    p_e: np.ndarray
    t_e: float
    profile_kind: str = LOGNORMAL

    def __post_init__(self) -> None:
        p_s = np.array(self.p_s, dtype=float)
        p_e = np.array(self.p_e, dtype=float)
        if p_s.shape != (3,) or p_e.shape != (3,):
            raise ValidationError('p_s', "起点 / 终点必须是 3 维点")
        if not (np.all(np.isfinite(p_s)) and np.all(np.isfinite(p_e))):
            raise ValidationError('p_s', "起点 / 终点必须为有限值")
        if not self.t_e > 0:
            raise ValidationError('t_e', f"必须 > 0，实际 {self.t_e!r}")
        if np.allclose(p_s, p_e, rtol=0.0, atol=VERTEX_TOL):
            raise ValidationError('p_e', "起点与终点重合，没有运动")
        check_profile_kind(self.profile_kind)
        p_s.setflags(write=False)
        p_e.setflags(write=False)
        object.__setattr__(self, 'p_s', p_s)
        object.__setattr__(self, 'p_e', p_e)
        object.__setattr__(self, 't_e', float(self.t_e))

    @property
    def delta(self) -> np.ndarray:
        return self.p_e - self.p_s

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.delta))


def lognormal_speed(t: ArrayLike, stroke: LognormalStroke):
    """D · exp(−(ln(t−t0)−μ)²/(2σ²)) / (σ(t−t0)√(2π))，t ≤ t0 时为 0"""
    dt = np.asarray(t, dtype=float) - stroke.t0
    out = np.zeros_like(dt)
    active = dt > 0
    x = dt[active]
    z = (np.log(x) - stroke.mu) / stroke.sigma
    out[active] = stroke.D * np.exp(-0.5 * z * z) / (stroke.sigma * x * _SQRT2PI)
    return _out(out)


def lognormal_cdf(t: ArrayLike, t0: float, mu: float, sigma: float):
    """½(1 + erf((ln(t−t0)−μ)/(σ√2)))，t ≤ t0 时为 0"""
    if not sigma > 0:
        raise ValidationError('sigma', f"必须 > 0，实际 {sigma!r}")
    dt = np.asarray(t, dtype=float) - t0
    out = np.zeros_like(dt)
    active = dt > 0
    out[active] = 0.5 * (1.0 + erf((np.log(dt[active]) - mu) / (sigma * _SQRT2)))
    return _out(out)


def _check_sigma_args(t_e: float, r_target: float, t0: float) -> None:
    if not t_e > t0:
        raise ValidationError('t_e', f"必须大于 t0（{t_e:g} ≤ {t0:g}）")
    if not 0.5 < r_target < 1.0:
        raise ValidationError('r_target', f"应在 (0.5, 1) 内，实际 {r_target!r}")


def solve_sigma_bisect(
    t_e: float, r_target: float, t0: float = 0.0, mu: float = DEFAULT_MU, xtol: float = 1e-15
) -> float:
    """二分法求 σ：lognormal_cdf(t_e) 关于 σ 单调递减，从 σ→0 时的 1 降到 σ→∞ 时的 ½"""
    _check_sigma_args(t_e, r_target, t0)
    log_delay = math.log(t_e - t0) - mu
    if log_delay <= 0:
        raise DegenerateDuration(t_e, t0, mu)

    def gap(sigma: float) -> float:
        return lognormal_cdf(t_e, t0, mu, sigma) - r_target

    lo, hi = log_delay * 1e-6, 1.0
    while gap(hi) > 0:
        hi *= 2.0
    return bisect(gap, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)


def solve_sigma(t_e: float, r_target: float, t0: float = 0.0, mu: float = DEFAULT_MU) -> float:
    """求 σ 使 lognormal_cdf(t_e; t0, μ, σ) = r_target

    闭式解 σ = (ln(t_e − t0) − μ) / (√2 · erfinv(2r − 1))；回代误差超过 1e-9 时
    退回二分法。

    Raises:
        DegenerateDuration: ln(t_e − t0) − μ ≤ 0，不存在正的 σ
    """
    _check_sigma_args(t_e, r_target, t0)
    log_delay = math.log(t_e - t0) - mu
    if log_delay <= 0:
        raise DegenerateDuration(t_e, t0, mu)
    sigma = log_delay / (_SQRT2 * float(erfinv(2.0 * r_target - 1.0)))
    if abs(lognormal_cdf(t_e, t0, mu, sigma) - r_target) > SIGMA_CHECK_TOL:
        logger.debug(f"σ 闭式解回代误差过大，改用二分法（t_e={t_e:g}, r={r_target:g}）")
        sigma = solve_sigma_bisect(t_e, r_target, t0, mu)
    return sigma


def stroke_for_duration(
    t_e: float,
    r_target: float = R_TARGET_TESTS,
    t0: float = 0.0,
    mu: float = DEFAULT_MU,
    D: float = 1.0,
) -> LognormalStroke:
    """构造在 t_e 时刻完成 r_target 比例位移的笔画

    时长过短（ln(t_e − t0) − μ ≤ 0）时把时间轴按 k = e/(t_e − t0) 缩放后求解，
    等价于取 μ_eff = ln(t_e − t0) − 1。
    """
    _check_sigma_args(t_e, r_target, t0)
    if math.log(t_e - t0) - mu <= 0:
        mu_eff = math.log(t_e - t0) - 1.0
        logger.debug(f"时长 {t_e - t0:g} s 过短，时间缩放后 μ 取 {mu_eff:.6g}")
        mu = mu_eff
    return LognormalStroke(t0, mu, solve_sigma(t_e, r_target, t0, mu), D)


def lognormal_position(t: ArrayLike, seg: SegmentSpec, t0: float, mu: float, sigma: float) -> np.ndarray:
    """逐轴 p(t) = p_s + (p_e − p_s)·r(t)；t 为数组时返回 (n, 3)"""
    r = np.asarray(lognormal_cdf(t, t0, mu, sigma), dtype=float)
    return seg.p_s + np.multiply.outer(r, seg.delta)


def trapezoid_times(distance: float, total_time: float, accel: float) -> TrapezoidSegment:
    """由距离、总时长、加速度求梯形相位

    t_acc 为 a·t² − a·T·t + d = 0 的较小根，写成 2(d/a) / (T + √(T² − 4d/a))
    避免 d 很小时的相减抵消。

    Raises:
        Infeasible: accel < 4d/T²，给定时间内走不完
    """
    for name, value in (('distance', distance), ('total_time', total_time), ('accel', accel)):
        if not (math.isfinite(value) and value > 0):
            raise ValidationError(name, f"必须为正的有限值，实际 {value!r}")
    ratio = distance / accel
    disc = total_time ** 2 - 4.0 * ratio
    if disc < 0:
        if disc < -1e-12 * total_time ** 2:
            raise Infeasible(distance, total_time, accel)
        disc = 0.0
    t_acc = 2.0 * ratio / (total_time + math.sqrt(disc))
    t_const = max(total_time - 2.0 * t_acc, 0.0)
    return TrapezoidSegment(t_acc, t_const, accel * t_acc, accel)


def trapezoid_speed(t: ArrayLike, tz: TrapezoidSegment):
    """三段速度律：匀加速、匀速、匀减速；区间外为 0"""
    t = np.asarray(t, dtype=float)
    total = tz.total_time
    ramp_up = tz.accel * t
    ramp_down = tz.accel * (total - t)
    out = np.minimum(np.minimum(ramp_up, ramp_down), tz.v_max)
    out = np.where((t <= 0) | (t >= total), 0.0, out)
    return _out(out)


def trapezoid_distance(t: ArrayLike, tz: TrapezoidSegment):
    """梯形速度律下 [0, t] 内走过的距离"""
    t = np.clip(np.asarray(t, dtype=float), 0.0, tz.total_time)
    cruise_end = tz.t_acc + tz.t_const
    ramp = 0.5 * tz.accel * tz.t_acc ** 2
    out = np.where(
        t < tz.t_acc,
        0.5 * tz.accel * t ** 2,
        np.where(
            t < cruise_end,
            ramp + tz.v_max * (t - tz.t_acc),
            tz.distance - 0.5 * tz.accel * (tz.total_time - t) ** 2,
        ),
    )
    return _out(out)


def trapezoid_position(t: ArrayLike, seg: SegmentSpec, tz: TrapezoidSegment) -> np.ndarray:
    """沿 (p_e − p_s) 方向按梯形距离推进；t 为数组时返回 (n, 3)"""
    progress = np.asarray(trapezoid_distance(t, tz), dtype=float) / tz.distance
    return seg.p_s + np.multiply.outer(progress, seg.delta)


@dataclass(frozen=True)
class StrokePlan:
    """叠加调度中的一笔：起始时刻、时长、位移向量与对应的速度律参数"""

    start: float
    duration: float
    delta: np.ndarray
    kind: str
    lognormal: Optional[LognormalStroke] = None
    trapezoid: Optional[TrapezoidSegment] = None

    @property
    def end(self) -> float:
        return self.start + self.duration

    def progress(self, t: ArrayLike) -> np.ndarray:
        """归一化进度 r_k(t) ∈ [0, 1]"""
        if self.kind == LOGNORMAL:
            s = self.lognormal
            return np.asarray(lognormal_cdf(t, s.t0, s.mu, s.sigma), dtype=float)
        local = np.asarray(t, dtype=float) - self.start
        return np.asarray(trapezoid_distance(local, self.trapezoid), dtype=float) / self.trapezoid.distance

    def speed(self, t: ArrayLike) -> np.ndarray:
        if self.kind == LOGNORMAL:
            return np.asarray(lognormal_speed(t, self.lognormal), dtype=float)
        return np.asarray(trapezoid_speed(np.asarray(t, dtype=float) - self.start, self.trapezoid), dtype=float)


def _gaps(pause: Union[float, Sequence[float]], n_segments: int) -> List[float]:
    if np.ndim(pause) == 0:
        gaps = [float(pause)] * (n_segments - 1)
    else:
        gaps = [float(p) for p in pause]
        if len(gaps) != n_segments - 1:
            raise ValidationError('pause', f"需要 {n_segments - 1} 个间隙停顿，实际 {len(gaps)} 个")
    if not all(math.isfinite(g) and g >= 0 for g in gaps):
        raise ValidationError('pause', "停顿必须为 ≥ 0 的有限值")
    return gaps


def check_chain(segments: Sequence[SegmentSpec]) -> None:
    """相邻两段必须首尾相接"""
    for k in range(len(segments) - 1):
        if not np.allclose(segments[k].p_e, segments[k + 1].p_s, rtol=0.0, atol=VERTEX_TOL):
            raise DisconnectedPolyline(k)


def plan_strokes(
    segments: Sequence[SegmentSpec],
    overlap_fraction: float,
    profile_kind: str,
    r_target: float = R_TARGET_TESTS,
    pause: Union[float, Sequence[float]] = 0.0,
    accel: Optional[float] = None,
    accel_limit: Optional[float] = None,
    speed_limit: Optional[float] = None,
) -> List[StrokePlan]:
    """计算每一笔的启动时刻与速度律参数

    第 k+1 笔在 t_end(k) − overlap·duration(k) + pause 时刻启动，pause 可逐个间隙给出。
    梯形曲线未给加速度时按加速段占 1/4 时长取值；加速度超过 accel_limit 时压到上限。
    """
    check_profile_kind(profile_kind)
    if not segments:
        raise ValidationError('segments', "至少需要 1 段")
    if not 0.0 <= overlap_fraction < 0.5:
        raise ValidationError('overlap', f"应在 [0, 0.5) 内，实际 {overlap_fraction!r}")
    gaps = _gaps(pause, len(segments))
    check_chain(segments)

    plans: List[StrokePlan] = []
    start = 0.0
    for k, seg in enumerate(segments):
        if profile_kind == LOGNORMAL:
            stroke = stroke_for_duration(start + seg.t_e, r_target, t0=start, D=seg.length)
            plans.append(StrokePlan(start, seg.t_e, seg.delta, LOGNORMAL, lognormal=stroke))
        else:
            a = accel
            if a is None:
                ramp = DEFAULT_RAMP_FRACTION * seg.t_e
                a = seg.length / (ramp * (seg.t_e - ramp))
            if accel_limit is not None and a > accel_limit:
                logger.warning(f"加速度 {a:.6g} mm/s² 超过模型上限，已限制为 {accel_limit:g}")
                a = accel_limit
            tz = trapezoid_times(seg.length, seg.t_e, a)
            if speed_limit is not None and tz.v_max > speed_limit:
                logger.warning(f"巡航速度 {tz.v_max:.6g} mm/s 超过模型上限 {speed_limit:g}")
            plans.append(StrokePlan(start, seg.t_e, seg.delta, TRAPEZOIDAL, trapezoid=tz))
        if k < len(gaps):
            start = start + seg.t_e - overlap_fraction * seg.t_e + gaps[k]
    return plans


def _snap_bound(plans: Sequence[StrokePlan], t_last: float, sample_period: float, r_target: float) -> float:
    """末点吸附修正量的预期上限"""
    last = plans[-1]
    if last.kind == LOGNORMAL:
        tails = (1.0 - r_target) * sum(float(np.linalg.norm(p.delta)) for p in plans)
        return tails + sample_period * float(last.speed(t_last))
    return 0.5 * last.trapezoid.accel * sample_period ** 2


def superpose_strokes(
    segments: Sequence[SegmentSpec],
    overlap_fraction: float,
    profile_kind: str,
    sample_period: float,
    r_target: float = R_TARGET_TESTS,
    pause: Union[float, Sequence[float]] = 0.0,
    accel: Optional[float] = None,
    accel_limit: Optional[float] = None,
    speed_limit: Optional[float] = None,
) -> TimedPath:
    """多段笔画叠加成等间隔采样的轨迹

    p(t) = p_s(0) + Σ_k Δ_k · r_k(t)，重叠区内各笔位移相加。采样点数为
    floor(总时长 / 采样周期) + 1，末点吸附到最后一段终点并记录修正量。

    Raises:
        DisconnectedPolyline: 相邻段不首尾相接
        Infeasible: 梯形曲线加速度不足
    """
    if not sample_period > 0:
        raise ValidationError('sample_period', f"必须 > 0，实际 {sample_period!r}")
    plans = plan_strokes(
        segments, overlap_fraction, profile_kind, r_target, pause, accel, accel_limit, speed_limit
    )
    total = max(p.end for p in plans)
    n = int(math.floor(total / sample_period + 1e-9)) + 1
    t = np.arange(n) * sample_period

    points = np.tile(segments[0].p_s, (n, 1))
    for plan in plans:
        points += np.multiply.outer(plan.progress(t), plan.delta)

    final = segments[-1].p_e
    correction = float(np.linalg.norm(final - points[-1]))
    points[-1] = final
    bound = _snap_bound(plans, float(t[-1]), sample_period, r_target)
    if correction > bound * (1.0 + 1e-9) + 1e-12:
        logger.warning(f"末点吸附修正 {correction:.3g} mm 超过预期 {bound:.3g} mm")
    else:
        logger.debug(f"末点吸附修正 {correction:.3g} mm")
    return TimedPath(t, points, sample_period)
