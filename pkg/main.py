#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
机械臂轨迹工具入口点

常用命令：
- 正运动学：python main.py fk 0 0 0 0 0 0
- 逆运动学（腕部冻结）：python main.py ik --target 350 0 500
- 生成轨迹文件：python main.py generate --figure small_square --profile lognormal
- 仿真记录并计算信噪比：python main.py verify output/small_square_lognormal.csv --simulate --noise-preset
- 实验演示（随包 5 个图形 × 2 种速度曲线）：python main.py --seed 7 demo
- 按运行清单重跑：python main.py replay output/demo.manifest.json

使用 python main.py -h 查看完整的帮助信息。
"""

from armtraj.cli import entry

if __name__ == '__main__':
    entry()
