"""命令行接口模块

提供命令行接口，串起整条流程：模型/图形读取 → 轨迹生成 → 逆解 → 仿真记录 → 信噪比报告 → 绘图数据。

generate / verify / demo / calibrate 的每组输出旁都写一份运行清单（*.manifest.json），
replay 子命令据此原样重跑。
"""

import argparse
import math
import sys
from argparse import Namespace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import FIGURES_DIR, config
from .errors import NumericError, ParseError, ValidationError
from .ik_solver import IKRequest, solve_paths_ik, solve_position_ik
from .kinematics import JointConfig, RobotModel, forward_kinematics
from .logger import logger, set_level
from .paths import JointTrajectory, TimedPath
from .profiles import LOGNORMAL, PROFILE_KINDS
from .reader import TrajectoryFile, load_figure, load_model, read_trajectory
from .storage import (
    RunManifest,
    emit_plot_data,
    file_digest,
    read_manifest,
    write_json,
    write_manifest,
    write_report,
    write_trajectory,
)
from .trajectory import FigureSpec, numeric_speed, path_to_joints, plan_figure, repeat_figure
from .verification import (
    ALIGN_WINDOW,
    BENCH_NOISE_STD,
    NOISE_PRESET_TARGET_DB,
    SensorModel,
    align,
    calibrate_noise_preset,
    record,
    snr,
)

Params = Dict[str, Any]

# 退出码
EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _pick(value, default):
    return default if value is None else value


def _angles(values: Sequence[float], deg: bool) -> List[float]:
    return [math.radians(v) if deg else float(v) for v in values]


def figure_path(value: str) -> Path:
    """图形参数既可以是文件路径，也可以是随包图形名（如 small_square）"""
    path = Path(value)
    packaged = FIGURES_DIR / f"{value}.yaml"
    if not path.exists() and packaged.exists():
        return packaged
    return path


def packaged_figures() -> List[Path]:
    return sorted(FIGURES_DIR.glob('*.yaml'))


def _ik_params() -> Params:
    return {
        'ik_tolerance': config.ik_tolerance,
        'ik_max_evals': config.ik_max_evals,
        'ik_max_step': config.ik_max_step,
    }


def _ik_kwargs(params: Params) -> Dict[str, Any]:
    return {
        'tolerance': params['ik_tolerance'],
        'max_evals': params['ik_max_evals'],
        'max_step': params['ik_max_step'],
    }


def _plan_params(args: Namespace) -> Params:
    return {
        'r_target': _pick(args.r_target, config.r_target),
        'overlap': _pick(args.overlap, config.overlap),
        'sample_period': _pick(args.sample_period, config.sample_period),
        'accel': args.accel,
    }


def _plan(figure: FigureSpec, kind: str, params: Params, model: RobotModel, repetitions: int) -> TimedPath:
    common = dict(
        overlap=params['overlap'],
        sample_period=params['sample_period'],
        r_target=params['r_target'],
        accel=params['accel'],
        model=model,
    )
    if repetitions == 1:
        return plan_figure(figure, kind, **common)
    return repeat_figure(figure, kind, repetitions, params['pause'], **common)


def _trajectory_params(figure: FigureSpec, params: Params, repetitions: int) -> Params:
    """写入轨迹表头的生成参数：配合图形文件即可确定性地重新生成"""
    return {
        'figure': figure.name,
        'r_target': params['r_target'],
        'overlap': params['overlap'],
        'sample_period': params['sample_period'],
        'accel': params['accel'],
        'repetitions': repetitions,
        'pause': params['pause'],
    }


def _print_outputs(out_dir: Path, outputs: Sequence[str]) -> None:
    for name in outputs:
        print(f"  {out_dir / name}")


# ---------------------------------------------------------------------------
# fk / ik：只打印，不写文件
# ---------------------------------------------------------------------------

def run_fk(model: RobotModel, q: Sequence[float]) -> int:
    """打印工具位姿矩阵与位置"""
    joints = JointConfig(tuple(q))
    try:
        joints = joints.validated_for(model)
    except ValidationError as e:
        # 正解对任意关节角都有定义，越限只提示
        logger.warning(f"{e}，仍按该关节角计算正解")
    pose = forward_kinematics(model, joints)
    print(f"模型: {model.model_id}")
    print("位姿矩阵:")
    for row in pose.matrix:
        print('  ' + ' '.join(f"{v:12.6f}" for v in row))
    x, y, z = pose.position
    print(f"工具位置: ({x:.6f}, {y:.6f}, {z:.6f}) mm")
    return EXIT_OK


def run_ik(model: RobotModel, req: IKRequest, deg: bool = False) -> int:
    """打印前三轴解、残差与评估次数"""
    sol = solve_position_ik(model, req)
    unit = 'deg' if deg else 'rad'
    q = [math.degrees(v) if deg else v for v in sol.joints.q]
    print(f"模型: {model.model_id}")
    print(f"关节角 ({unit}): " + ', '.join(f"q{k + 1}={v:.6f}" for k, v in enumerate(q)))
    print(f"残差: {sol.residual:.3e} mm²（容差 {req.tolerance:g}）")
    print(f"评估次数: {sol.evals_used}，{'已收敛' if sol.converged else '未收敛'}")
    return EXIT_OK


def cmd_fk(args: Namespace) -> int:
    model = load_model(config.resolved_model_path)
    return run_fk(model, _angles(args.q, args.deg))


def cmd_ik(args: Namespace) -> int:
    model = load_model(config.resolved_model_path)
    req = IKRequest(
        target=tuple(args.target),
        q46=tuple(_angles(args.q46, args.deg)),
        seed=tuple(_angles(args.ik_seed, args.deg)),
        tolerance=_pick(args.tolerance, config.ik_tolerance),
        max_evals=_pick(args.max_evals, config.ik_max_evals),
    )
    return run_ik(model, req, args.deg)


# ---------------------------------------------------------------------------
# generate / verify / demo / calibrate：params 即清单中的全部参数，replay 直接复用
# ---------------------------------------------------------------------------

def run_generate(params: Params, out_dir: Path) -> int:
    """图形 → 笛卡尔轨迹（→ 关节轨迹）→ 轨迹文件 + 速度曲线 + 清单"""
    model_file, figure_file = Path(params['model']), Path(params['figure'])
    model = load_model(model_file)
    figure = load_figure(figure_file)
    kind = params['profile']
    repetitions = int(params['repetitions'])

    path = _plan(figure, kind, params, model, repetitions)
    joints = None
    if params['joints']:
        joints = path_to_joints(model, path, figure.q46, figure.seed, **_ik_kwargs(params))

    stem = f"{figure.name}_{kind}"
    traj = TrajectoryFile(path, joints, model.model_id, kind, _trajectory_params(figure, params, repetitions))
    write_trajectory(out_dir / f"{stem}.csv", traj)
    csv_path, svg_path = emit_plot_data(
        path.t, {kind: numeric_speed(path)}, out_dir / f"{stem}_speed",
        paths={figure.name: path}, title=f"{figure.name} ({kind})",
    )

    manifest = RunManifest('generate', params, rng_seed=int(params['seed']))
    manifest.add_input(model_file)
    manifest.add_input(figure_file)
    manifest.outputs = [f"{stem}.csv", csv_path.name, svg_path.name]
    write_manifest(out_dir / f"{stem}.manifest.json", manifest)

    print(f"已生成 {figure.name}（{kind}）: {len(path)} 个采样点，时长 {path.duration:.3f} s")
    if joints is not None and joints.discontinuities:
        print(f"注意: {len(joints.discontinuities)} 处关节跳变，索引 {list(joints.discontinuities)}")
    _print_outputs(out_dir, manifest.outputs)
    return EXIT_OK


def cmd_generate(args: Namespace) -> int:
    params = {
        'model': str(config.resolved_model_path),
        'figure': str(figure_path(args.figure)),
        'profile': args.profile,
        'repetitions': args.repetitions,
        'pause': args.pause,
        'joints': not args.no_joints,
        'seed': config.seed,
        **_plan_params(args),
        **_ik_params(),
    }
    return run_generate(params, Path(config.output_dir))


def _sensor(params: Params) -> SensorModel:
    return SensorModel(
        rate=params['sensor_rate'],
        position_noise_std=params['noise_std'],
        latency=params['latency'],
        quantization=params['quantization'],
    )


def run_verify(params: Params, out_dir: Path) -> int:
    """编程轨迹与记录轨迹（或仿真记录）对齐后按速度计算信噪比"""
    programmed_file = Path(params['programmed'])
    programmed = read_trajectory(programmed_file)
    stem = programmed_file.stem
    manifest = RunManifest('verify', params, rng_seed=int(params['seed']))
    manifest.add_input(programmed_file)

    if params['recorded']:
        recorded_file = Path(params['recorded'])
        recorded = read_trajectory(recorded_file).path
        manifest.add_input(recorded_file)
        source_name = recorded_file.name
    else:
        source: Any = programmed.path
        model = None
        if programmed.joints is not None:
            # 有关节列时按关节轨迹经正运动学记录，顺带检验逆解精度
            model_file = Path(params['model'])
            model = load_model(model_file)
            manifest.add_input(model_file)
            source = programmed.joints
        sensor = _sensor(params)
        recorded = record(source, sensor, int(params['seed']), model)
        sensor_params = {
            'rate': sensor.rate,
            'position_noise_std': sensor.position_noise_std,
            'latency': sensor.latency,
            'quantization': sensor.quantization,
            'rng_seed': int(params['seed']),
        }
        source_name = f"{stem}_recorded.csv"
        write_trajectory(
            out_dir / source_name,
            TrajectoryFile(recorded, None, programmed.model_id, programmed.profile, sensor_params),
        )
        manifest.outputs.append(source_name)

    aligned = align(programmed.path, recorded, params['window'], params['smooth'])
    report = snr(aligned.v_programmed, aligned.v_recorded, aligned.rate, aligned.offset)
    report_name = f"{stem}_report.json"
    write_report(out_dir / report_name, report, extra={
        'programmed': programmed_file.name,
        'recorded': source_name,
    })
    csv_path, svg_path = emit_plot_data(
        aligned.t,
        {'programmed': aligned.v_programmed, 'recorded': aligned.v_recorded},
        out_dir / f"{stem}_verify",
        title=f"SNR = {'inf' if report.perfect_match else f'{report.snr_db:.2f}'} dB",
    )
    manifest.outputs += [report_name, csv_path.name, svg_path.name]
    write_manifest(out_dir / f"{stem}_verify.manifest.json", manifest)

    print(report.describe())
    _print_outputs(out_dir, manifest.outputs)
    return EXIT_OK


def cmd_verify(args: Namespace) -> int:
    noise_std = BENCH_NOISE_STD if args.noise_preset else args.noise_std
    params = {
        'model': str(config.resolved_model_path),
        'programmed': args.programmed,
        'recorded': args.recorded,
        'sensor_rate': _pick(args.sensor_rate, config.sensor_rate),
        'noise_std': noise_std,
        'latency': args.latency,
        'quantization': args.quantization,
        'window': args.window,
        'smooth': not args.no_smooth,
        'seed': config.seed,
    }
    return run_verify(params, Path(config.output_dir))


def presentation_order(names: Sequence[str], seed: int) -> List[str]:
    """按种子打乱演示顺序，同一种子结果相同"""
    rng = np.random.default_rng(seed)
    return [names[k] for k in rng.permutation(len(names))]


def run_demo(params: Params, out_dir: Path) -> int:
    """实验演示：每个图形各生成对数正态 / 梯形两份轨迹（各重复 repetitions 次），打乱演示顺序"""
    repetitions = int(params['repetitions'])
    if repetitions < 1:
        raise ValidationError('repetitions', f"必须 ≥ 1，实际 {repetitions}")
    model_file = Path(params['model'])
    model = load_model(model_file)
    figure_files = [Path(p) for p in params['figures']]
    if not figure_files:
        raise ValidationError('figures', "至少需要 1 个图形")

    manifest = RunManifest('demo', params, rng_seed=int(params['seed']))
    manifest.add_input(model_file)

    planned: List[Tuple[FigureSpec, str, TimedPath]] = []
    for figure_file in figure_files:
        figure = load_figure(figure_file)
        manifest.add_input(figure_file)
        for kind in PROFILE_KINDS:
            planned.append((figure, kind, _plan(figure, kind, params, model, repetitions)))

    joints: List[Optional[JointTrajectory]] = [None] * len(planned)
    if params['joints']:
        # 同一图形的两种速度曲线共用腕部角与种子，成对并发求解
        for k in range(0, len(planned), len(PROFILE_KINDS)):
            group = planned[k:k + len(PROFILE_KINDS)]
            figure = group[0][0]
            solved = solve_paths_ik(model, [p for _, _, p in group], figure.q46, figure.seed, **_ik_kwargs(params))
            joints[k:k + len(PROFILE_KINDS)] = solved

    names = []
    for (figure, kind, path), q in zip(planned, joints):
        name = f"{figure.name}_{kind}.csv"
        traj = TrajectoryFile(path, q, model.model_id, kind, _trajectory_params(figure, params, repetitions))
        write_trajectory(out_dir / name, traj)
        names.append(name)

    order = presentation_order(names, int(params['seed']))
    manifest.outputs = names
    manifest.details = {'presentation_order': order}
    write_manifest(out_dir / 'demo.manifest.json', manifest)

    print(f"已生成 {len(names)} 份轨迹（{len(figure_files)} 个图形 × {len(PROFILE_KINDS)} 种速度曲线，各重复 {repetitions} 次）")
    print("演示顺序:")
    for k, name in enumerate(order, 1):
        print(f"  {k:2d}. {name}")
    return EXIT_OK


def cmd_demo(args: Namespace) -> int:
    figures = [figure_path(f) for f in args.figures] if args.figures else packaged_figures()
    params = {
        'model': str(config.resolved_model_path),
        'figures': [str(p) for p in figures],
        'repetitions': args.repetitions,
        'pause': args.pause,
        'joints': not args.no_joints,
        'seed': config.seed,
        **_plan_params(args),
        **_ik_params(),
    }
    return run_demo(params, Path(config.output_dir))


def run_calibrate(params: Params, out_dir: Path) -> int:
    """标定噪声预设：参考正方形两种速度曲线平均信噪比等于 target_db 时的位置噪声标准差"""
    seed = int(params['seed'])
    seeds = range(seed, seed + int(params['n_seeds']))
    std = calibrate_noise_preset(
        params['target_db'], seeds=seeds, rate=params['sensor_rate'], sample_period=params['sample_period'],
    )
    write_json(out_dir / 'calibration.json', {
        'noise_std': std,
        'target_db': params['target_db'],
        'sensor_rate': params['sensor_rate'],
        'sample_period': params['sample_period'],
        'seeds': list(seeds),
    })
    manifest = RunManifest('calibrate', params, outputs=['calibration.json'], rng_seed=seed)
    write_manifest(out_dir / 'calibrate.manifest.json', manifest)
    print(f"位置噪声标准差: {std:.6g} mm（目标 {params['target_db']:g} dB）")
    return EXIT_OK


def cmd_calibrate(args: Namespace) -> int:
    params = {
        'target_db': args.target_db,
        'n_seeds': args.seeds,
        'sensor_rate': _pick(args.sensor_rate, config.sensor_rate),
        'sample_period': _pick(args.sample_period, config.sample_period),
        'seed': config.seed,
    }
    return run_calibrate(params, Path(config.output_dir))


RUNNERS: Dict[str, Callable[[Params, Path], int]] = {
    'generate': run_generate,
    'verify': run_verify,
    'demo': run_demo,
    'calibrate': run_calibrate,
}


def run_replay(manifest_path: Path, out_dir: Optional[Path] = None) -> int:
    """按清单重跑；输入文件摘要与清单不一致时拒绝执行"""
    manifest = read_manifest(manifest_path)
    runner = RUNNERS.get(manifest.subcommand)
    if runner is None:
        raise ValidationError('subcommand', f"不支持重跑 {manifest.subcommand!r}", str(manifest_path))
    for path, digest in manifest.inputs.items():
        if file_digest(path) != digest:
            raise ValidationError('inputs', f"输入文件 {path} 已变化（摘要不一致）", str(manifest_path))
    target = out_dir if out_dir is not None else manifest_path.parent
    logger.info(f"按清单重跑 {manifest.subcommand}: {manifest_path} → {target}")
    return runner(manifest.params, target)


def cmd_replay(args: Namespace) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else None
    return run_replay(Path(args.manifest), out_dir)


def parse_args(argv: Optional[Sequence[str]] = None) -> Namespace:
    """解析命令行参数

    Returns:
        Namespace: 解析后的命令行参数
    """
    parser = argparse.ArgumentParser(
        prog='armtraj',
        description='六轴机械臂对数正态 / 梯形速度轨迹生成与信噪比校验工具',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            '典型用法:\n'
            '  armtraj fk 0 0 0 0 0 0                                   # 示例模型零位的工具位姿\n'
            '  armtraj ik --target 350 0 500                            # 冻结腕部的位置逆解\n'
            '  armtraj generate --figure small_square --profile trapezoidal\n'
            '  armtraj verify output/small_square_trapezoidal.csv --simulate --noise-preset\n'
            '  armtraj --seed 7 demo                                    # 实验演示：5 个图形 × 2 种速度曲线\n'
            '  armtraj --out-dir rerun replay output/demo.manifest.json   # 按清单重跑到新目录\n'
            '\n'
            '注意: --model / --out-dir / --seed / --no-tqdm 等全局参数需放在子命令之前'
        ),
    )

    # 通用参数
    parser.add_argument('--model', help='机器人模型 YAML（默认使用随包示例模型）')
    parser.add_argument('--out-dir', help='输出目录（默认取 .env 的 ARMTRAJ_OUTPUT_DIR，缺省 output）')
    parser.add_argument('--seed', type=int, default=None, help='随机种子（仿真噪声、演示顺序）')
    parser.add_argument('--no-tqdm', action='store_true', help='禁用进度条')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='日志级别')

    subparsers = parser.add_subparsers(dest='command', help='子命令')

    # 正运动学
    fk_parser = subparsers.add_parser('fk', help='正运动学：关节角 → 工具位姿')
    fk_parser.add_argument('q', type=float, nargs=6, metavar='Q', help='六个关节角（默认弧度）')
    fk_parser.add_argument('--deg', action='store_true', help='关节角以度为单位')
    fk_parser.set_defaults(func=cmd_fk)

    # 逆运动学
    ik_parser = subparsers.add_parser('ik', help='逆运动学：工具位置 → 前三轴（腕部冻结）')
    ik_parser.add_argument('--target', type=float, nargs=3, required=True, metavar=('X', 'Y', 'Z'), help='目标位置（mm）')
    ik_parser.add_argument('--q46', type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar='Q', help='冻结的腕部角')
    ik_parser.add_argument('--ik-seed', type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar='Q', help='前三轴初值')
    ik_parser.add_argument('--deg', action='store_true', help='角度输入输出以度为单位')
    ik_parser.add_argument('--tolerance', type=float, default=None, help='残差容差（mm²，默认 1e-8）')
    ik_parser.add_argument('--max-evals', type=int, default=None, help='评估次数上限（默认 2000）')
    ik_parser.set_defaults(func=cmd_ik)

    def add_plan_arguments(p: argparse.ArgumentParser) -> None:
        p.add_argument('--r-target', type=float, default=None, help='对数正态终点比例 r（默认 0.99）')
        p.add_argument('--overlap', type=float, default=None, help='笔画重叠比例，[0, 0.5)（默认 0）')
        p.add_argument('--sample-period', type=float, default=None, help='采样周期（s，默认 0.024）')
        p.add_argument('--accel', type=float, default=None, help='梯形加速度（mm/s²，默认取图形文件或 1/4 斜坡）')
        p.add_argument('--no-joints', action='store_true', help='只输出笛卡尔轨迹，不做逆解')

    # 轨迹生成
    gen_parser = subparsers.add_parser('generate', help='图形 → 轨迹文件（笛卡尔 + 关节列）')
    gen_parser.add_argument('--figure', required=True, help='图形 YAML 路径或随包图形名')
    gen_parser.add_argument('--profile', choices=PROFILE_KINDS, default=LOGNORMAL, help='速度曲线')
    gen_parser.add_argument('--repetitions', type=int, default=1, help='连续执行次数（>1 要求闭合图形）')
    gen_parser.add_argument('--pause', type=float, default=1.0, help='两次执行之间的停顿（s）')
    add_plan_arguments(gen_parser)
    gen_parser.set_defaults(func=cmd_generate)

    # 执行验证
    verify_parser = subparsers.add_parser('verify', help='编程轨迹与记录轨迹的速度信噪比')
    verify_parser.add_argument('programmed', help='编程轨迹文件')
    source = verify_parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--recorded', help='记录轨迹文件')
    source.add_argument('--simulate', action='store_true', help='用仿真传感器记录编程轨迹')
    verify_parser.add_argument('--sensor-rate', type=float, default=None, help='传感器采样率（Hz，默认 200）')
    noise = verify_parser.add_mutually_exclusive_group()
    noise.add_argument('--noise-std', type=float, default=0.0, help='位置噪声标准差（mm）')
    noise.add_argument('--noise-preset', action='store_true', help=f'使用标定的噪声预设（{BENCH_NOISE_STD} mm）')
    verify_parser.add_argument('--latency', type=float, default=0.0, help='传感器延迟（s）')
    verify_parser.add_argument('--quantization', type=float, default=0.0, help='位置量化步长（mm）')
    verify_parser.add_argument('--window', type=float, default=ALIGN_WINDOW, help='对齐搜索窗口（s）')
    verify_parser.add_argument('--no-smooth', action='store_true', help='速度不做 3 点平滑')
    verify_parser.set_defaults(func=cmd_verify)

    # 实验演示
    demo_parser = subparsers.add_parser('demo', help='实验演示：成对生成两种速度曲线并打乱演示顺序')
    demo_parser.add_argument('--figures', nargs='*', help='图形路径或随包图形名（默认全部随包图形）')
    demo_parser.add_argument('--repetitions', type=int, default=3, help='每份轨迹的重复次数')
    demo_parser.add_argument('--pause', type=float, default=1.0, help='重复之间的停顿（s）')
    add_plan_arguments(demo_parser)
    demo_parser.set_defaults(func=cmd_demo)

    # 按清单重跑
    replay_parser = subparsers.add_parser('replay', help='按运行清单重跑，输出逐字节一致')
    replay_parser.add_argument('manifest', help='*.manifest.json')
    replay_parser.set_defaults(func=cmd_replay)

    # 噪声预设标定
    cal_parser = subparsers.add_parser('calibrate', help='标定噪声预设（蒙特卡洛）')
    cal_parser.add_argument('--target-db', type=float, default=NOISE_PRESET_TARGET_DB, help='目标平均信噪比（dB）')
    cal_parser.add_argument('--seeds', type=int, default=8, help='每种速度曲线的噪声种子数')
    cal_parser.add_argument('--sensor-rate', type=float, default=None, help='传感器采样率（Hz，默认 200）')
    cal_parser.add_argument('--sample-period', type=float, default=None, help='参考轨迹采样周期（s，默认 0.024）')
    cal_parser.set_defaults(func=cmd_calibrate)

    return parser.parse_args(argv)


def update_config(args: Namespace) -> None:
    """根据命令行参数更新配置

    Args:
        args: 解析后的命令行参数
    """
    if args.model:
        config.model_path = args.model
    if args.out_dir:
        config.output_dir = args.out_dir
    if args.seed is not None:
        config.seed = args.seed
    if args.no_tqdm:
        config.use_tqdm = False
    if args.log_level:
        set_level(args.log_level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数

    Returns:
        int: 程序退出码，0 成功；2 参数/校验/解析错误；3 数值求解失败；4 文件读写错误
    """
    args = parse_args(argv)
    update_config(args)

    if not getattr(args, 'func', None):
        logger.error("请指定子命令，使用 -h 查看帮助信息")
        return EXIT_INVALID

    try:
        return args.func(args)
    except (ValidationError, ParseError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID
    except NumericError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERIC
    except OSError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_IO


def entry() -> None:
    """console script 入口：统一处理中断与未捕获异常的退出码"""
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n程序被用户中断")
        sys.exit(1)
    except Exception as e:
        print(f"\n程序运行出错: {e}")
        sys.exit(1)


if __name__ == '__main__':
    entry()
