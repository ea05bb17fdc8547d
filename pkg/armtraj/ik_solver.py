"""逆运动学模块

负责冻结腕部（q4, q5, q6）后的位置逆解，包括：
- 位置误差函数（目标点与正运动学工具位置的平方距离）
- 无导数下山单纯形（Nelder–Mead）最小化
- 单点逆解：关节限位罚函数 + 可达性判定
- 路径逆解：以上一采样点的解作为下一点的种子（热启动），检测换枝跳变
- 多条路径并发求解
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .config import config
from .errors import BudgetExhausted, Unreachable, ValidationError
from .kinematics import JointConfig, RobotModel, tool_position
from .logger import logger, progress_logging
from .paths import JointTrajectory, TimedPath

# 单纯形初始边长（rad，绝对偏移，零附近的角度很常见）
SIMPLEX_STEP = 0.05
# 收敛阈值：函数值离散度（mm²）与单纯形直径（rad）
F_SPREAD_TOL = 1e-12
X_DIAMETER_TOL = 1e-8
MAX_EVALS = 2000

# 反射 / 扩展 / 收缩 / 压缩系数
ALPHA, GAMMA, RHO, SIGMA = 1.0, 2.0, 0.5, 0.5

# 收敛后残差超过 1 mm² 视为目标点不可达
REACH_THRESHOLD = 1.0
# 关节限位罚函数系数，以及收敛后允许的越限量（rad）
LIMIT_PENALTY = 1e6
LIMIT_SLACK = 1e-6

# 热启动单纯形边长：上一步关节增量的 2 倍，夹在 [1e-5, SIMPLEX_STEP] 内
WARM_STEP_MIN = 1e-5
WARM_STEP_FACTOR = 2.0


@dataclass(frozen=True)
class SimplexResult:
    """单纯形最小化结果；exhausted 表示评估次数用尽时仍未收敛"""

    x: np.ndarray
    fun: float
    evals: int
    converged: bool
    exhausted: bool


class _BudgetReached(Exception):
    pass


def minimize_simplex(
    f: Callable[[np.ndarray], float],
    seed: Sequence[float],
    tolerance: float = F_SPREAD_TOL,
    max_evals: int = MAX_EVALS,
    step: float = SIMPLEX_STEP,
    x_tolerance: float = X_DIAMETER_TOL,
    f_target: Optional[float] = None,
    raise_on_budget: bool = False,
) -> SimplexResult:
    """Nelder–Mead 下山单纯形

    初始单纯形为种子点加上沿每个坐标轴偏移 step 的 n 个顶点。函数值离散度
    < tolerance·max(1, |f_best|) 且单纯形直径 < x_tolerance 时收敛；best 顶点达到 f_target 时提前停止。
    返回的 fun 永远不大于 f(seed)。

    Args:
        f: 目标函数，NaN 按 +inf 处理
        seed: 初始点
        tolerance: 函数值离散度阈值
        max_evals: 函数评估次数上限
        step: 初始单纯形边长
        x_tolerance: 单纯形直径阈值
        f_target: 可选的目标函数值，达到即停
        raise_on_budget: 评估次数用尽时抛出 BudgetExhausted（结果挂在异常上）

    Returns:
        SimplexResult
    """
    if max_evals < 1:
        raise ValidationError('max_evals', f"必须 ≥ 1，实际 {max_evals}")
    x0 = np.array(seed, dtype=float).ravel()
    n = len(x0)

    evals = 0
    best_x, best_f = x0.copy(), math.inf

    def call(x: np.ndarray) -> float:
        nonlocal evals, best_x, best_f
        if evals >= max_evals:
            raise _BudgetReached
        evals += 1
        value = float(f(x))
        if math.isnan(value):
            value = math.inf
        if value < best_f or evals == 1:
            best_x, best_f = x.copy(), value
        return value

    def done(converged: bool, exhausted: bool) -> SimplexResult:
        result = SimplexResult(best_x, best_f, evals, converged, exhausted)
        if exhausted and raise_on_budget:
            raise BudgetExhausted(result)
        return result

    def reached(value: float) -> bool:
        return f_target is not None and value <= f_target

    try:
        if reached(call(x0)):
            return done(True, False)

        simplex = np.vstack([x0, x0 + step * np.eye(n)])
        fs = np.empty(n + 1)
        fs[0] = best_f
        for i in range(1, n + 1):
            fs[i] = call(simplex[i])

        while True:
            order = np.argsort(fs, kind='stable')
            simplex, fs = simplex[order], fs[order]
            if reached(fs[0]):
                return done(True, False)
            spread = fs[-1] - fs[0]
            diameter = np.max(np.abs(simplex[1:] - simplex[0]))
            # |f| > 1 时离散度阈值随 |f| 放大
            if spread < tolerance * max(1.0, abs(fs[0])) and diameter < x_tolerance:
                return done(True, False)

            centroid = simplex[:-1].mean(axis=0)
            worst = simplex[-1]

            # 反射
            xr = centroid + ALPHA * (centroid - worst)
            fr = call(xr)
            if fs[0] <= fr < fs[-2]:
                simplex[-1], fs[-1] = xr, fr
                continue

            # 扩展
            if fr < fs[0]:
                xe = centroid + GAMMA * (xr - centroid)
                fe = call(xe)
                if fe < fr:
                    simplex[-1], fs[-1] = xe, fe
                else:
                    simplex[-1], fs[-1] = xr, fr
                continue

            # 收缩：反射点优于最差点时外收缩，否则内收缩
            if fr < fs[-1]:
                xc = centroid + RHO * (xr - centroid)
                fc = call(xc)
                if fc <= fr:
                    simplex[-1], fs[-1] = xc, fc
                    continue
            else:
                xc = centroid + RHO * (worst - centroid)
                fc = call(xc)
                if fc < fs[-1]:
                    simplex[-1], fs[-1] = xc, fc
                    continue

            # 压缩：除最优点外全部向最优点收拢
            for i in range(1, n + 1):
                simplex[i] = simplex[0] + SIGMA * (simplex[i] - simplex[0])
                fs[i] = call(simplex[i])
    except _BudgetReached:
        return done(False, True)


def position_error(
    q13: Sequence[float], q46: Sequence[float], target: Sequence[float], model: RobotModel
) -> float:
    """(px − pcx)² + (py − pcy)² + (pz − pcz)²，p_c 为 [q13, q46] 的工具位置（mm²）"""
    q = np.concatenate([np.asarray(q13, dtype=float), np.asarray(q46, dtype=float)])
    diff = np.asarray(target, dtype=float) - tool_position(model, q)
    return float(diff @ diff)


def _limit_excess(q13: np.ndarray, model: RobotModel) -> np.ndarray:
    lo = np.array([lim[0] for lim in model.joint_limits[:3]])
    hi = np.array([lim[1] for lim in model.joint_limits[:3]])
    return np.maximum(lo - q13, 0.0) + np.maximum(q13 - hi, 0.0)


def _check_wrist(q46: Sequence[float], model: RobotModel) -> None:
    """冻结的腕部角不参与优化，只能在求解前按 q4…q6 限位拒绝"""
    for k, (value, (lo, hi)) in enumerate(zip(q46, model.joint_limits[3:]), start=4):
        if not lo <= value <= hi:
            raise ValidationError('q46', f"q{k} = {value:.6g} rad 超出限位 [{lo:.6g}, {hi:.6g}]")


def _triple(name: str, values: Sequence[float]) -> Tuple[float, float, float]:
    out = tuple(float(v) for v in values)
    if len(out) != 3:
        raise ValidationError(name, f"需要 3 个分量，实际 {len(out)} 个")
    if not all(math.isfinite(v) for v in out):
        raise ValidationError(name, "必须为有限值")
    return out


@dataclass(frozen=True)
class IKRequest:
    """单点逆解请求：目标位置（mm）、冻结腕部角、前三轴种子、残差容差（mm²）、评估上限"""

    target: Tuple[float, float, float]
    q46: Tuple[float, float, float]
    seed: Tuple[float, float, float]
    tolerance: float = 1e-8
    max_evals: int = MAX_EVALS
    simplex_step: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, 'target', _triple('target', self.target))
        object.__setattr__(self, 'q46', _triple('q46', self.q46))
        object.__setattr__(self, 'seed', _triple('seed', self.seed))
        if not self.tolerance > 0:
            raise ValidationError('tolerance', f"必须 > 0，实际 {self.tolerance!r}")
        if int(self.max_evals) < 1:
            raise ValidationError('max_evals', f"必须 ≥ 1，实际 {self.max_evals!r}")
        if self.simplex_step is not None and not self.simplex_step > 0:
            raise ValidationError('simplex_step', f"必须 > 0，实际 {self.simplex_step!r}")


@dataclass(frozen=True)
class IKSolution:
    """逆解结果：q13c 为前三轴解，q46 原样保留"""

    q13c: Tuple[float, float, float]
    q46: Tuple[float, float, float]
    residual: float
    evals_used: int
    converged: bool

    @property
    def joints(self) -> JointConfig:
        return JointConfig(self.q13c + self.q46)


def solve_position_ik(model: RobotModel, req: IKRequest) -> IKSolution:
    """冻结腕部的位置逆解

    目标函数为位置误差加关节限位罚函数 1e6·Σ越限²。收敛后残差 > 1 mm² 或解仍越限
    视为不可达；评估次数用尽且残差未达容差时抛 BudgetExhausted。

    Raises:
        ValidationError: 腕部角超出限位
        Unreachable: 目标点在工作空间外
        BudgetExhausted: 评估次数用尽
    """
    _check_wrist(req.q46, model)
    target = np.array(req.target)
    q46 = np.array(req.q46)

    # 工作空间外接球之外不必迭代
    gap = float(np.linalg.norm(target)) - model.reach
    if gap > 0:
        raise Unreachable(residual=gap * gap)

    def objective(q13: np.ndarray) -> float:
        err = position_error(q13, q46, target, model)
        excess = _limit_excess(q13, model)
        return err + LIMIT_PENALTY * float(excess @ excess)

    result = minimize_simplex(
        objective,
        req.seed,
        max_evals=int(req.max_evals),
        step=req.simplex_step or SIMPLEX_STEP,
        f_target=req.tolerance,
    )
    q13c = tuple(float(v) for v in result.x)
    residual = position_error(q13c, q46, target, model)
    solution = IKSolution(q13c, req.q46, residual, result.evals, residual <= req.tolerance)

    # 预算用尽时无从判断是否可达，先报预算
    if result.exhausted and not solution.converged:
        raise BudgetExhausted(solution)
    if residual > REACH_THRESHOLD:
        raise Unreachable(residual=residual)
    if np.any(_limit_excess(result.x, model) > LIMIT_SLACK):
        raise Unreachable(residual=residual)
    logger.debug(f"逆解完成: 残差 {residual:.3g} mm²，评估 {result.evals} 次")
    return solution


def _warm_step(previous: np.ndarray, current: np.ndarray) -> float:
    delta = float(np.max(np.abs(current - previous)))
    return float(np.clip(WARM_STEP_FACTOR * delta, WARM_STEP_MIN, SIMPLEX_STEP))


def solve_path_ik(
    model: RobotModel,
    path: TimedPath,
    q46: Sequence[float],
    seed0: Sequence[float],
    tolerance: Optional[float] = None,
    max_evals: Optional[int] = None,
    max_step: Optional[float] = None,
    progress: Optional[bool] = None,
) -> JointTrajectory:
    """逐点逆解整条路径，第 k 点以第 k−1 点的解为种子

    第 2 点起单纯形边长取上一步关节增量的 2 倍（夹在 [1e-5, 0.05] rad），
    热启动的种子离解很近，大单纯形只会浪费评估次数。

    Args:
        model: 机器人模型
        path: 笛卡尔轨迹
        q46: 冻结的腕部角
        seed0: 第一个采样点的种子
        tolerance: 残差容差（mm²），缺省取 config.ik_tolerance
        max_evals: 每点评估上限，缺省取 config.ik_max_evals
        max_step: 相邻两点 ‖Δq13‖ 上限（rad），超过记为换枝跳变并告警
        progress: 是否显示进度条，缺省取 config.use_tqdm

    Returns:
        与 path 同时间戳的 JointTrajectory

    Raises:
        ValidationError: 腕部角超出限位
        Unreachable: index 为第一个失败的采样点
        BudgetExhausted: index 为第一个未收敛的采样点
    """
    tolerance = config.ik_tolerance if tolerance is None else tolerance
    max_evals = config.ik_max_evals if max_evals is None else max_evals
    max_step = config.ik_max_step if max_step is None else max_step
    progress = config.use_tqdm if progress is None else progress

    wrist = _triple('q46', q46)
    _check_wrist(wrist, model)
    seed = np.array(_triple('seed0', seed0))
    step: Optional[float] = None

    rows: List[Tuple[float, ...]] = []
    evals: List[int] = []
    jumps: List[int] = []

    indexed = enumerate(path.p)
    with progress_logging(progress):
        iterator = tqdm(indexed, total=len(path), desc='逆解', leave=False) if progress else indexed
        for k, target in iterator:
            req = IKRequest(tuple(target), wrist, tuple(seed), tolerance, max_evals, step)
            try:
                sol = solve_position_ik(model, req)
            except Unreachable as e:
                raise Unreachable(index=k, residual=e.residual) from e
            except BudgetExhausted as e:
                raise BudgetExhausted(result=e.result, index=k) from e

            q13 = np.array(sol.q13c)
            if k > 0 and np.linalg.norm(q13 - seed) > max_step:
                jumps.append(k)
                logger.warning(
                    f"第 {k} 个采样点关节增量 {np.linalg.norm(q13 - seed):.3g} rad 超过 {max_step:g}，疑似换枝"
                )
            if k > 0:
                step = _warm_step(seed, q13)
            seed = q13
            rows.append(sol.q13c + wrist)
            evals.append(sol.evals_used)

    logger.debug(f"路径逆解完成: {len(rows)} 点，共评估 {sum(evals)} 次")
    return JointTrajectory(
        t=path.t,
        q=np.array(rows),
        model_id=model.model_id,
        sample_period=path.sample_period,
        evals=tuple(evals),
        discontinuities=tuple(jumps),
    )


def solve_paths_ik(
    model: RobotModel,
    paths: Sequence[TimedPath],
    q46: Sequence[float],
    seed0: Sequence[float],
    max_workers: Optional[int] = None,
    **kwargs,
) -> List[JointTrajectory]:
    """并发求解多条互不相关的路径，返回顺序与输入一致"""
    kwargs.setdefault('progress', False)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(solve_path_ik, model, p, q46, seed0, **kwargs) for p in paths]
        return [f.result() for f in futures]
