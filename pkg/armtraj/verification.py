"""执行验证模块

负责模拟传感器记录并按信噪比评价执行轨迹与编程轨迹的一致程度，包括：
- 传感器模型：采样率、位置噪声、延迟、量化
- record: 编程轨迹（或关节轨迹经正运动学）→ 模拟记录
- snr: 速度序列的信噪比（dB）
- align / compare: 把编程轨迹重采样到记录时钟，互相关对齐后计算信噪比
- 噪声预设标定：找出使参考正方形两种速度曲线平均落在 23 dB 的噪声标准差
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import AlignmentError, ValidationError, ZeroSignal
from .kinematics import RobotModel
from .logger import logger
from .paths import JointTrajectory, TimedPath
from .profiles import LOGNORMAL, TRAPEZOIDAL
from .trajectory import FigureSpec, numeric_speed, plan_figure

# 记录传感器缺省采样率（Hz）
DEFAULT_SENSOR_RATE = 200.0

# 对齐搜索窗口（s）
ALIGN_WINDOW = 0.25

# 采样周期一致性判定容差（s）
PERIOD_TOL = 1e-12

# 噪声预设：参考正方形两种速度曲线的平均信噪比目标
NOISE_PRESET_TARGET_DB = 23.0
# calibrate_noise_preset() 在缺省参数下得到的位置噪声标准差（mm）
BENCH_NOISE_STD = 0.0444

CALIBRATION_SEEDS = tuple(range(8))

# 参考正方形：边长 100 mm，每边 2 s
REFERENCE_EDGE = 100.0
REFERENCE_EDGE_DURATION = 2.0


@dataclass(frozen=True)
class SensorModel:
    """模拟位置传感器：rate 采样率（Hz），噪声标准差 / 量化步长（mm），延迟（s）"""

    rate: float = DEFAULT_SENSOR_RATE
    position_noise_std: float = 0.0
    latency: float = 0.0
    quantization: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValidationError('rate', f"必须 > 0，实际 {self.rate!r}")
        for name in ('position_noise_std', 'latency', 'quantization'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(name, f"必须 ≥ 0，实际 {value!r}")

    @property
    def period(self) -> float:
        return 1.0 / self.rate

    @classmethod
    def identity_for(cls, path: TimedPath) -> 'SensorModel':
        """与 path 同采样率、无噪声无延迟的理想传感器"""
        return cls(rate=1.0 / path.sample_period)


@dataclass(frozen=True)
class SNRReport:
    """信噪比报告；snr_db 为 +inf 表示完全一致"""

    snr_db: float
    n_samples: int
    resampling_rate: float
    alignment_offset: float

    def __post_init__(self) -> None:
        if self.n_samples < 2:
            raise ValidationError('n_samples', f"至少需要 2 个样本，实际 {self.n_samples}")

    @property
    def perfect_match(self) -> bool:
        return self.snr_db == math.inf

    def describe(self) -> str:
        value = 'inf' if self.perfect_match else f"{self.snr_db:.4f}"
        return f"SNR = {value} dB（{self.n_samples} 个样本，对齐偏移 {self.alignment_offset:+.3f} s）"


@dataclass(frozen=True, eq=False)
class AlignedSpeeds:
    """对齐后的速度序列：t 为记录时钟，offset 为记录相对编程的滞后（s）"""

    t: np.ndarray
    v_programmed: np.ndarray
    v_recorded: np.ndarray
    offset: float
    rate: float


def record(
    source: Union[TimedPath, JointTrajectory],
    sensor: SensorModel,
    rng_seed: int = 0,
    model: Optional[RobotModel] = None,
) -> TimedPath:
    """模拟传感器记录

    输入位置（关节轨迹先经正运动学）按传感器采样率线性插值重采样，延迟 latency，
    再叠加固定种子的高斯噪声并量化。采样率与输入一致且无延迟时直接复用原数据。
    """
    if isinstance(source, JointTrajectory):
        if model is None:
            raise ValidationError('model', "记录关节轨迹需要提供机器人模型")
        path = source.tool_path(model)
    else:
        path = source

    if abs(sensor.period - path.sample_period) <= PERIOD_TOL:
        t, period = path.t, path.sample_period
    else:
        period = sensor.period
        n = int(math.floor(path.duration / period + 1e-9)) + 1
        t = path.t[0] + np.arange(n) * period

    if sensor.latency == 0 and t is path.t:
        p = path.p.copy()
    else:
        # 延迟开始前保持起点
        query = t - sensor.latency
        p = np.column_stack([np.interp(query, path.t, path.p[:, k]) for k in range(3)])

    if sensor.position_noise_std > 0:
        rng = np.random.default_rng(rng_seed)
        p = p + rng.normal(0.0, sensor.position_noise_std, size=p.shape)
    if sensor.quantization > 0:
        p = np.round(p / sensor.quantization) * sensor.quantization
    return TimedPath(t, p, period)


def snr(
    v_programmed: Sequence[float],
    v_recorded: Sequence[float],
    resampling_rate: float = math.nan,
    alignment_offset: float = 0.0,
) -> SNRReport:
    """SNR = 10·log10(Σ v_p² / Σ (v_p − v_r)²)

    Raises:
        ZeroSignal: 编程速度能量为 0
    """
    vp = np.asarray(v_programmed, dtype=float)
    vr = np.asarray(v_recorded, dtype=float)
    if vp.ndim != 1 or vp.shape != vr.shape:
        raise ValidationError('v_recorded', f"两组速度长度不一致（{vp.shape} / {vr.shape}），请先重采样")
    if len(vp) < 2:
        raise ValidationError('n_samples', f"至少需要 2 个样本，实际 {len(vp)}")
    signal = float(np.sum(vp * vp))
    if signal == 0:
        raise ZeroSignal()
    error = float(np.sum((vp - vr) ** 2))
    snr_db = math.inf if error == 0 else 10.0 * math.log10(signal / error)
    return SNRReport(snr_db, len(vp), resampling_rate, alignment_offset)


def smooth3(v: np.ndarray) -> np.ndarray:
    """3 点滑动平均，两端保持原值"""
    out = np.array(v, dtype=float)
    if len(out) >= 3:
        out[1:-1] = (v[:-2] + v[1:-1] + v[2:]) / 3.0
    return out


def xcorr_norm(x: np.ndarray, y: np.ndarray) -> float:
    """归一化互相关"""
    denom = math.sqrt(float(np.sum(x * x)) * float(np.sum(y * y)))
    return float(np.sum(x * y)) / denom if denom > 0 else 0.0


def _speed(t: np.ndarray, p: np.ndarray, period: float, smooth: bool) -> np.ndarray:
    v = numeric_speed(TimedPath(t, p, period))
    return smooth3(v) if smooth else v


def align(
    programmed: TimedPath,
    recorded: TimedPath,
    window: float = ALIGN_WINDOW,
    smooth: bool = True,
) -> AlignedSpeeds:
    """把编程轨迹重采样到记录时钟并做时间对齐

    候选偏移为 ±window 内记录周期的整数倍。对每个偏移 δ，编程位置在 t − δ 处
    线性插值，两组位置用同一差分与平滑流程求速度，取归一化互相关最大者；
    相关度相同时取 |δ| 较小的偏移。

    Raises:
        AlignmentError: 任何偏移下重叠样本都少于 2 个
    """
    period = recorded.sample_period
    steps = int(math.floor(window / period + 1e-9))
    candidates = sorted(range(-steps, steps + 1), key=lambda k: (abs(k), k))

    best = None
    best_score = -math.inf
    for k in candidates:
        offset = k * period
        query = recorded.t - offset
        mask = (query >= programmed.t[0] - PERIOD_TOL) & (query <= programmed.t[-1] + PERIOD_TOL)
        if np.count_nonzero(mask) < 2:
            continue
        t = recorded.t[mask]
        p_prog = np.column_stack([np.interp(query[mask], programmed.t, programmed.p[:, j]) for j in range(3)])
        v_prog = _speed(t, p_prog, period, smooth)
        v_rec = _speed(t, recorded.p[mask], period, smooth)
        score = xcorr_norm(v_prog, v_rec)
        if best is None or score > best_score + 1e-12:
            best, best_score = (t, v_prog, v_rec, offset), score

    if best is None:
        raise AlignmentError(
            f"编程轨迹 [{programmed.t[0]:g}, {programmed.t[-1]:g}] s 与记录轨迹 "
            f"[{recorded.t[0]:g}, {recorded.t[-1]:g}] s 没有足够的重叠样本"
        )
    t, v_prog, v_rec, offset = best
    logger.debug(f"对齐偏移 {offset:+.4f} s，相关系数 {best_score:.6f}")
    return AlignedSpeeds(t, v_prog, v_rec, offset, 1.0 / period)


def compare(
    programmed: TimedPath,
    recorded: TimedPath,
    window: float = ALIGN_WINDOW,
    smooth: bool = True,
) -> SNRReport:
    """对齐后按速度模长计算信噪比"""
    aligned = align(programmed, recorded, window, smooth)
    return snr(aligned.v_programmed, aligned.v_recorded, aligned.rate, aligned.offset)


def reference_square(origin: Sequence[float] = (350.0, -50.0, 450.0)) -> FigureSpec:
    """噪声标定用的参考正方形（x 为常数的平面内）"""
    x, y, z = (float(v) for v in origin)
    edge = REFERENCE_EDGE
    return FigureSpec(
        name='reference_square',
        vertices=[(x, y, z), (x, y + edge, z), (x, y + edge, z + edge), (x, y, z + edge)],
        closed=True,
        segment_duration=REFERENCE_EDGE_DURATION,
    )


def mean_snr(
    noise_std: float,
    paths: Sequence[TimedPath],
    seeds: Iterable[int] = CALIBRATION_SEEDS,
    rate: float = DEFAULT_SENSOR_RATE,
) -> float:
    """给定噪声标准差下，各轨迹、各种子的平均信噪比（dB）"""
    sensor = SensorModel(rate=rate, position_noise_std=noise_std)
    values = [compare(path, record(path, sensor, seed)).snr_db for path in paths for seed in seeds]
    return float(np.mean(values))


def calibrate_noise_preset(
    target_db: float = NOISE_PRESET_TARGET_DB,
    seeds: Iterable[int] = CALIBRATION_SEEDS,
    rate: float = DEFAULT_SENSOR_RATE,
    sample_period: float = 0.024,
    lo: float = 1e-3,
    hi: float = 10.0,
    iterations: int = 30,
) -> float:
    """在对数空间二分噪声标准差，使参考正方形两种速度曲线的平均信噪比等于 target_db"""
    seeds = tuple(seeds)
    figure = reference_square()
    paths = [plan_figure(figure, kind, overlap=0.0, sample_period=sample_period) for kind in (LOGNORMAL, TRAPEZOIDAL)]

    log_lo, log_hi = math.log(lo), math.log(hi)
    if mean_snr(lo, paths, seeds, rate) < target_db or mean_snr(hi, paths, seeds, rate) > target_db:
        raise ValidationError('target_db', f"{target_db:g} dB 不在 [{lo:g}, {hi:g}] mm 噪声范围可达区间内")
    for _ in range(iterations):
        mid = 0.5 * (log_lo + log_hi)
        if mean_snr(math.exp(mid), paths, seeds, rate) > target_db:
            log_lo = mid
        else:
            log_hi = mid
    std = math.exp(0.5 * (log_lo + log_hi))
    logger.info(f"噪声预设标定完成: 位置噪声标准差 {std:.4g} mm → 平均 {target_db:g} dB")
    return std
