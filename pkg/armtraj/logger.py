"""日志模块

armtraj 的日志都挂在名为 armtraj 的 logger 下：数据（位姿、SNR、输出路径）由 cli 直接 print，
告警与错误走 logger。逐点逆解显示 tqdm 进度条时，日志需经 progress_logging 转写，
否则告警行会把进度条截断。
"""

import logging
import os
import sys
from contextlib import nullcontext
from typing import ContextManager, Optional, Union

from dotenv import find_dotenv, load_dotenv
from tqdm.contrib.logging import logging_redirect_tqdm

# logger 可能先于 config 导入，这里也加载一次 .env（load_dotenv 幂等）
# usecwd=True 理由见 config.py
load_dotenv(find_dotenv(usecwd=True))

LOGGER_NAME = 'armtraj'

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def parse_level(value: Union[int, str, None], default: int = logging.INFO) -> int:
    """'debug' / 'WARNING' / 10 → logging 级别；无法识别时回退 default"""
    if isinstance(value, int):
        return value
    level = getattr(logging, str(value or '').strip().upper(), None)
    return level if isinstance(level, int) else default


def setup_logger(
    name: str = LOGGER_NAME,
    level: Optional[int] = None
) -> logging.Logger:
    """配置并返回 logger 实例

    Args:
        name: logger 名称
        level: 日志级别，None 时取 .env 的 LOG_LEVEL（缺省 INFO，非法值也回退 INFO）

    Returns:
        配置好的 Logger 实例；重复调用不会叠加 handler
    """
    logger = logging.getLogger(name)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(handler)

    logger.setLevel(level if level is not None else parse_level(os.getenv('LOG_LEVEL')))
    return logger


def set_level(level: Union[int, str]) -> None:
    """命令行 --log-level 覆盖 .env 的级别"""
    logger.setLevel(parse_level(level))


def progress_logging(enabled: bool) -> ContextManager:
    """进度条期间把 armtraj 的日志改经 tqdm.write 输出；enabled=False 时什么也不做"""
    if not enabled:
        return nullcontext()
    return logging_redirect_tqdm(loggers=[logger])


# 全局 logger 实例
logger = setup_logger()
