"""配置管理模块

负责加载和管理程序的配置参数，包括：
- 机器人模型文件路径
- 输出目录
- 轨迹采样周期、对数正态终点比例 r、笔画重叠比例
- 仿真传感器采样率
- 逆运动学容差、评估次数上限、跳枝检测阈值
- 随机种子与进度条开关
"""

import os
from pathlib import Path
from typing import Callable, TypeVar

from dotenv import find_dotenv, load_dotenv

# 加载 .env：usecwd=True 从当前工作目录向上查找。
# 默认行为是从本文件所在目录（pip 安装后为 site-packages）向上找，
# 导致 pip 安装的用户放在工作目录的 .env 被静默忽略
load_dotenv(find_dotenv(usecwd=True))

# 随包发布的示例数据（示例几何，非厂商标定值）
DATA_DIR = Path(__file__).parent / 'data'
SAMPLE_MODEL_PATH = DATA_DIR / 'sample_model.yaml'
FIGURES_DIR = DATA_DIR / 'figures'

T = TypeVar('T')


def _env(name: str, default: str, cast: Callable[[str], T]) -> T:
    """读取并转换环境变量，配错时给出带变量名的明确错误，而非裸 traceback"""
    raw = os.getenv(name, default)
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise ValueError(f"{name} 配置无效: {raw!r}，请检查 .env")


class Config:
    """配置类"""

    model_path: str
    output_dir: str
    sample_period: float
    r_target: float
    overlap: float
    sensor_rate: float
    ik_tolerance: float
    ik_max_evals: int
    ik_max_step: float
    seed: int
    use_tqdm: bool

    def __init__(self) -> None:
        """初始化配置"""
        # 机器人模型文件，空串表示使用随包示例模型
        self.model_path = os.getenv('ARMTRAJ_MODEL', '')

        # 输出目录
        self.output_dir = os.getenv('ARMTRAJ_OUTPUT_DIR', 'output')

        # 轨迹生成
        self.sample_period = _env('ARMTRAJ_SAMPLE_PERIOD', '0.024', float)
        self.r_target = _env('ARMTRAJ_R_TARGET', '0.99', float)
        self.overlap = _env('ARMTRAJ_OVERLAP', '0.0', float)

        # 仿真传感器
        self.sensor_rate = _env('ARMTRAJ_SENSOR_RATE', '200', float)

        # 逆运动学
        self.ik_tolerance = _env('ARMTRAJ_IK_TOLERANCE', '1e-8', float)
        self.ik_max_evals = _env('ARMTRAJ_IK_MAX_EVALS', '2000', int)
        self.ik_max_step = _env('ARMTRAJ_IK_MAX_STEP', '0.2', float)

        self.seed = _env('ARMTRAJ_SEED', '0', int)

        # 是否使用进度条
        self.use_tqdm = os.getenv('USE_TQDM', 'True').lower() == 'true'

    @property
    def resolved_model_path(self) -> Path:
        """实际使用的模型文件：未配置时回退随包示例模型"""
        return Path(self.model_path) if self.model_path else SAMPLE_MODEL_PATH


# 创建全局配置实例
config = Config()
