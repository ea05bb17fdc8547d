"""异常定义

所有异常继承 ArmTrajError；CLI 按类别映射退出码：
校验/解析 → 2，数值失败 → 3，文件系统 → 4。
"""

from typing import Any, Optional


class ArmTrajError(Exception):
    """armtraj 异常基类"""


class ValidationError(ArmTrajError, ValueError):
    """领域对象不满足不变量（字段名 + 原因，来自文件时带文件路径）"""

    def __init__(self, field: str, reason: str, source: Optional[str] = None) -> None:
        self.field = field
        self.reason = reason
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(f"{where}字段 {field}: {reason}")


class ParseError(ArmTrajError, ValueError):
    """文件无法解析（行号从 1 开始，未知时为 None）"""

    def __init__(self, line: Optional[int], reason: str, source: Optional[str] = None) -> None:
        self.line = line
        self.reason = reason
        self.source = source
        where = source or '<input>'
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {reason}")


class NumericError(ArmTrajError):
    """数值求解失败的基类"""


class Unreachable(NumericError):
    """目标点在工作空间外：收敛后残差仍超过可达阈值"""

    def __init__(self, index: Optional[int] = None, residual: float = float('nan')) -> None:
        self.index = index
        self.residual = residual
        at = f"第 {index} 个采样点" if index is not None else "目标点"
        super().__init__(f"{at}不可达，残差 {residual:.6g} mm²")


class BudgetExhausted(NumericError):
    """评估次数用尽仍未收敛；result 保留当前最优结果"""

    def __init__(self, result: Any = None, index: Optional[int] = None) -> None:
        self.result = result
        self.index = index
        at = f"第 {index} 个采样点" if index is not None else "求解"
        evals = getattr(result, 'evals', '?')
        super().__init__(f"{at}在 {evals} 次评估内未收敛")


class Infeasible(NumericError, ValueError):
    """梯形规划不可行：加速度不足以在给定时间内走完距离"""

    def __init__(self, distance: float, total_time: float, accel: float) -> None:
        self.distance = distance
        self.total_time = total_time
        self.accel = accel
        need = 4.0 * distance / total_time ** 2
        super().__init__(
            f"梯形速度不可行: 距离 {distance:g} mm / 时间 {total_time:g} s "
            f"需要加速度 ≥ {need:g} mm/s²，实际 {accel:g}"
        )


class DegenerateDuration(NumericError, ValueError):
    """ln(t_e − t0) − μ ≤ 0 时不存在正的 σ"""

    def __init__(self, t_e: float, t0: float, mu: float) -> None:
        self.t_e = t_e
        self.t0 = t0
        self.mu = mu
        super().__init__(
            f"持续时间退化: ln(t_e − t0) − μ = ln({t_e - t0:g}) − {mu:g} ≤ 0，无正的 σ"
        )


class DisconnectedPolyline(ValidationError):
    """折线不连续：第 index 段终点与下一段起点不重合"""

    def __init__(self, index: int) -> None:
        self.index = index
        super().__init__(f"segments[{index}]", "终点与下一段起点不重合")


class ZeroSignal(NumericError):
    """编程速度能量为 0，SNR 无定义"""

    def __init__(self) -> None:
        super().__init__("编程速度序列能量为 0，无法计算 SNR")


class AlignmentError(NumericError):
    """编程与记录序列时间上无法对齐（无重叠区间）"""
