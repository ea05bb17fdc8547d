"""armtraj - 六轴机械臂直线/折线轨迹生成、仿真记录与 SNR 校验工具

对数正态（类人）与梯形（类机器人）两种速度规律，含 DH 正运动学与
腕部冻结的数值逆运动学。
"""

__version__ = "0.1.0"

from .logger import logger, setup_logger

__all__ = ["logger", "setup_logger", "__version__"]
