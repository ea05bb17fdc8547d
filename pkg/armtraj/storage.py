"""数据存储模块

负责把结果写入输出目录，支持：
- 机器人模型 / 图形（YAML，可被 reader 原样读回）
- 轨迹文件（CSV，17 位有效数字保证无损往返）
- 绘图数据（CSV 列数据 + SVG 矢量图）
- 运行清单（JSON，含输入文件摘要，可据此复现）
- 信噪比报告（JSON）

所有输出都是确定性的：相同输入得到逐字节相同的文件。
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from matplotlib import rc_context
from matplotlib.figure import Figure

from .errors import ParseError, ValidationError
from .kinematics import RobotModel
from .logger import logger
from .paths import JOINT_COLUMNS, POSITION_COLUMNS, TimedPath
from .reader import FORMAT_VERSION, TrajectoryFile
from .trajectory import FigureSpec
from .verification import SNRReport

PathLike = Union[str, Path]

FLOAT_FORMAT = '%.17g'

# SVG 内部 id 的哈希盐，固定后输出可逐字节复现
SVG_HASHSALT = 'armtraj'


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def file_digest(path: PathLike) -> str:
    """文件的 sha256 摘要"""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _dump_yaml(path: PathLike, doc: Dict[str, Any]) -> Path:
    path = _prepare(path)
    text = yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, default_flow_style=None)
    path.write_text(text, encoding='utf-8')
    return path


def save_model(model: RobotModel, path: PathLike) -> Path:
    """机器人模型写成 YAML（弧度），load_model 读回后与原对象相等"""
    doc = {
        'format_version': FORMAT_VERSION,
        'model_id': model.model_id,
        'units': 'rad',
        'link_lengths': list(model.link_lengths),
        'dh': [
            {'theta_offset': r.theta_offset, 'd': r.d, 'a': r.a, 'alpha': r.alpha}
            for r in model.rows
        ],
        'joint_limits': [[lo, hi] for lo, hi in model.joint_limits],
        'max_tool_speed': model.max_tool_speed,
        'max_tool_accel': model.max_tool_accel,
    }
    return _dump_yaml(path, doc)


def save_figure(figure: FigureSpec, path: PathLike) -> Path:
    """图形写成 YAML（弧度）"""
    doc: Dict[str, Any] = {
        'format_version': FORMAT_VERSION,
        'name': figure.name,
        'units': 'rad',
        'closed': figure.closed,
        'vertices': figure.vertices.tolist(),
    }
    if figure.segment_duration is not None:
        doc['segment_duration'] = float(figure.segment_duration)
    if figure.total_duration is not None:
        doc['total_duration'] = float(figure.total_duration)
    if figure.accel is not None:
        doc['accel'] = float(figure.accel)
    doc['q46'] = list(figure.q46)
    doc['seed'] = list(figure.seed)
    return _dump_yaml(path, doc)


def _write_csv(df: pd.DataFrame, path: Path, header_lines: Sequence[str] = ()) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_trajectory(path: PathLike, traj: TrajectoryFile) -> Path:
    """轨迹写成 CSV

    列顺序固定为 t, px, py, pz[, q1…q6]；表头注释行依次为 format_version、model_id、
    profile、sample_period、joints、params（JSON，键排序）。
    """
    path = _prepare(path)
    df = traj.path.to_frame()
    if traj.joints is not None:
        if len(traj.joints) != len(traj.path) or not np.array_equal(traj.joints.t, traj.path.t):
            raise ValidationError('joints', "关节轨迹与笛卡尔轨迹时间戳不一致")
        for k, name in enumerate(JOINT_COLUMNS):
            df[name] = traj.joints.q[:, k]
    header = [
        f"format_version: {FORMAT_VERSION}",
        f"model_id: {traj.model_id}",
        f"profile: {traj.profile}",
        f"sample_period: {traj.path.sample_period!r}",
        f"joints: {'true' if traj.joints is not None else 'false'}",
        f"params: {json.dumps(traj.params, sort_keys=True, ensure_ascii=False)}",
    ]
    _write_csv(df[['t'] + POSITION_COLUMNS + (JOINT_COLUMNS if traj.joints is not None else [])], path, header)
    logger.debug(f"轨迹已保存到: {path}")
    return path


def _projection_axes(points: np.ndarray) -> Tuple[int, int]:
    """取坐标跨度最大的两个轴，稳定排序保证并列时结果确定"""
    spans = np.ptp(points, axis=0)
    order = np.argsort(-spans, kind='stable')
    return tuple(sorted(order[:2].tolist()))


def emit_plot_data(
    t: Sequence[float],
    series: Mapping[str, Sequence[float]],
    path: PathLike,
    paths: Optional[Mapping[str, TimedPath]] = None,
    title: Optional[str] = None,
) -> Tuple[Path, Path]:
    """写出绘图数据与矢量图

    Args:
        t: 时间轴
        series: 名称 → 与 t 等长的速度序列
        path: 输出路径（不含扩展名），生成 <path>.csv 与 <path>.svg
        paths: 可选，名称 → 笛卡尔轨迹，在第二幅子图画出其投影
        title: 图标题

    Returns:
        (csv 路径, svg 路径)
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or len(t) == 0:
        raise ValidationError('t', "绘图数据不能为空")
    if not series:
        raise ValidationError('series', "至少需要 1 条序列")
    columns = {'t': t}
    for name, values in series.items():
        values = np.asarray(values, dtype=float)
        if values.shape != t.shape:
            raise ValidationError(f"series[{name}]", f"长度 {len(values)} 与时间轴 {len(t)} 不一致")
        columns[name] = values

    base = _prepare(path)
    csv_path = base.with_name(base.name + '.csv')
    svg_path = base.with_name(base.name + '.svg')
    _write_csv(pd.DataFrame(columns), csv_path)

    with rc_context({'svg.hashsalt': SVG_HASHSALT, 'svg.fonttype': 'path'}):
        fig = Figure(figsize=(10, 4) if paths else (6, 4))
        ax = fig.add_subplot(1, 2, 1) if paths else fig.add_subplot(1, 1, 1)
        for name in series:
            ax.plot(t, columns[name], label=name)
        ax.set_xlabel('t (s)')
        ax.set_ylabel('speed (mm/s)')
        ax.grid(True, alpha=0.3)
        ax.legend()
        if paths:
            ax3 = fig.add_subplot(1, 2, 2)
            stacked = np.vstack([p.p for p in paths.values()])
            i, j = _projection_axes(stacked)
            labels = 'xyz'
            for name, p in paths.items():
                ax3.plot(p.p[:, i], p.p[:, j], label=name)
            ax3.set_xlabel(f"{labels[i]} (mm)")
            ax3.set_ylabel(f"{labels[j]} (mm)")
            ax3.set_aspect('equal', adjustable='datalim')
            ax3.legend()
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(svg_path, format='svg', metadata={'Date': None})
    logger.debug(f"绘图数据已保存到: {csv_path}, {svg_path}")
    return csv_path, svg_path


@dataclass
class RunManifest:
    """运行清单：子命令、全部解析后的参数、输入文件摘要、输出文件与随机种子"""

    subcommand: str
    params: Dict[str, Any]
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    rng_seed: int = 0
    details: Dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def add_input(self, path: PathLike) -> None:
        self.inputs[str(path)] = file_digest(path)


def write_json(path: PathLike, doc: Dict[str, Any]) -> Path:
    """JSON 输出（键排序，末尾换行）"""
    path = _prepare(path)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + '\n', encoding='utf-8')
    return path


def write_manifest(path: PathLike, manifest: RunManifest) -> Path:
    path = write_json(path, asdict(manifest))
    logger.debug(f"运行清单已保存到: {path}")
    return path


def read_manifest(path: PathLike) -> RunManifest:
    """读取运行清单

    Raises:
        ParseError: 文件不存在或 JSON 格式错误
        ValidationError: 缺少必需字段
    """
    source = str(path)
    try:
        doc = json.loads(Path(path).read_text(encoding='utf-8'))
    except FileNotFoundError:
        raise ParseError(None, "文件不存在", source)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, f"JSON 格式错误: {e.msg}", source)
    if not isinstance(doc, dict):
        raise ParseError(None, "顶层必须是对象", source)
    for key in ('subcommand', 'params'):
        if key not in doc:
            raise ValidationError(key, "清单缺少该字段", source)
    if doc.get('format_version', FORMAT_VERSION) != FORMAT_VERSION:
        raise ValidationError('format_version', f"不支持的版本 {doc['format_version']!r}", source)
    return RunManifest(
        subcommand=doc['subcommand'],
        params=doc['params'],
        inputs=doc.get('inputs', {}),
        outputs=doc.get('outputs', []),
        rng_seed=int(doc.get('rng_seed', 0)),
        details=doc.get('details', {}),
    )


def report_to_dict(report: SNRReport) -> Dict[str, Any]:
    def number(value: float) -> Any:
        if math.isnan(value):
            return None
        return 'inf' if value == math.inf else value

    return {
        'format_version': FORMAT_VERSION,
        'snr_db': number(report.snr_db),
        'n_samples': report.n_samples,
        'resampling_rate': number(report.resampling_rate),
        'alignment_offset': report.alignment_offset,
    }


def write_report(path: PathLike, report: SNRReport, extra: Optional[Dict[str, Any]] = None) -> Path:
    """信噪比报告写成 JSON（+inf 写作字符串 inf，NaN 写作 null）"""
    doc = report_to_dict(report)
    if extra:
        doc.update(extra)
    path = write_json(path, doc)
    logger.debug(f"信噪比报告已保存到: {path}")
    return path
