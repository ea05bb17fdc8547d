"""数据读取模块

负责读取配置与轨迹文件，并在读入时完成全部校验，支持：
- 机器人模型（YAML）
- 折线图形（YAML）
- 轨迹文件（带 # 注释表头的 CSV）

角度在文件里默认用度（units: deg），读入后一律换算为弧度。
"""

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
import yaml

from .errors import ParseError, ValidationError
from .kinematics import DEFAULT_LIMITS, DHRow, RobotModel
from .logger import logger
from .paths import JOINT_COLUMNS, POSITION_COLUMNS, JointTrajectory, TimedPath
from .trajectory import FigureSpec

FORMAT_VERSION = 1

PathLike = Union[str, Path]


@dataclass
class TrajectoryFile:
    """轨迹文件内容：表头参数足以确定性地重新生成该轨迹"""

    path: TimedPath
    joints: Optional[JointTrajectory] = None
    model_id: str = ''
    profile: str = ''
    params: Dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION


def _load_yaml(path: PathLike) -> Dict[str, Any]:
    source = str(path)
    try:
        text = Path(path).read_text(encoding='utf-8')
    except FileNotFoundError:
        raise ParseError(None, "文件不存在", source)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else None
        reason = getattr(e, 'problem', None) or str(e)
        raise ParseError(line, f"YAML 格式错误: {reason}", source)
    if not isinstance(doc, dict):
        raise ParseError(None, "顶层必须是键值映射", source)
    version = doc.get('format_version', FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ValidationError('format_version', f"不支持的版本 {version!r}（当前 {FORMAT_VERSION}）", source)
    return doc


def _angle_scale(doc: Dict[str, Any], source: str) -> float:
    units = doc.get('units', 'deg')
    if units == 'deg':
        return math.pi / 180.0
    if units == 'rad':
        return 1.0
    raise ValidationError('units', f"应为 deg / rad，实际 {units!r}", source)


def _numbers(value: Any, name: str, source: str, length: Optional[int] = None) -> List[float]:
    if not isinstance(value, (list, tuple)):
        raise ValidationError(name, f"应为数值列表，实际 {type(value).__name__}", source)
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ValidationError(name, f"含非数值元素: {value!r}", source)
    if length is not None and len(out) != length:
        raise ValidationError(name, f"需要 {length} 个数，实际 {len(out)} 个", source)
    return out


def _scalar(doc: Dict[str, Any], key: str, default: float, source: str) -> float:
    value = doc.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(key, f"应为数值，实际 {value!r}", source)


def load_model(path: PathLike) -> RobotModel:
    """读取机器人模型

    文件给出 dh（逐行 theta_offset/d/a/alpha）时按表构造，否则按 link_lengths（L1…L5）
    套用六轴臂 DH 表。

    Raises:
        ParseError: 文件不存在或 YAML 语法错误
        ValidationError: 字段缺失或不满足模型约束
    """
    source = str(path)
    doc = _load_yaml(path)
    scale = _angle_scale(doc, source)

    limits = None
    if 'joint_limits' in doc:
        raw = doc['joint_limits']
        if not isinstance(raw, list):
            raise ValidationError('joint_limits', "应为 [min, max] 列表", source)
        limits = [
            tuple(v * scale for v in _numbers(pair, f"joint_limits[{k}]", source, 2))
            for k, pair in enumerate(raw)
        ]

    kwargs = {
        'max_tool_speed': _scalar(doc, 'max_tool_speed', 1000.0, source),
        'max_tool_accel': _scalar(doc, 'max_tool_accel', 5000.0, source),
        'model_id': str(doc.get('model_id', Path(path).stem)),
    }
    try:
        if 'dh' in doc:
            rows_raw = doc['dh']
            if not isinstance(rows_raw, list):
                raise ValidationError('dh', "应为 DH 参数行的列表", source)
            rows = []
            for k, row in enumerate(rows_raw):
                if not isinstance(row, dict):
                    raise ValidationError(f"dh[{k}]", "应为 theta_offset/d/a/alpha 映射", source)
                try:
                    rows.append(DHRow(
                        theta_offset=float(row.get('theta_offset', 0.0)) * scale,
                        d=float(row.get('d', 0.0)),
                        a=float(row.get('a', 0.0)),
                        alpha=float(row.get('alpha', 0.0)) * scale,
                    ))
                except ValidationError:
                    raise
                except (TypeError, ValueError):
                    raise ValidationError(f"dh[{k}]", f"含非数值元素: {row!r}", source)
            lengths = _numbers(doc.get('link_lengths', []), 'link_lengths', source)
            model = RobotModel(
                rows=tuple(rows),
                link_lengths=tuple(lengths),
                joint_limits=tuple(limits) if limits else DEFAULT_LIMITS,
                **kwargs,
            )
        elif 'link_lengths' in doc:
            lengths = _numbers(doc['link_lengths'], 'link_lengths', source)
            model = RobotModel.table1(lengths, joint_limits=limits, **kwargs)
        else:
            raise ValidationError('dh', "缺少 dh 或 link_lengths", source)
    except ValidationError as e:
        if e.source:
            raise
        raise ValidationError(e.field, e.reason, source) from e
    logger.debug(f"已加载机器人模型 {model.model_id}: {source}")
    return model


def load_figure(path: PathLike) -> FigureSpec:
    """读取折线图形

    Raises:
        ParseError: 文件不存在或 YAML 语法错误
        ValidationError: 字段缺失或不满足图形约束
    """
    source = str(path)
    doc = _load_yaml(path)
    scale = _angle_scale(doc, source)
    if 'vertices' not in doc:
        raise ValidationError('vertices', "缺少顶点列表", source)
    raw = doc['vertices']
    if not isinstance(raw, list):
        raise ValidationError('vertices', "应为 [x, y, z] 列表", source)
    vertices = [_numbers(v, f"vertices[{k}]", source, 3) for k, v in enumerate(raw)]

    def optional(key: str) -> Optional[float]:
        value = doc.get(key)
        if value is None:
            return None
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ValidationError(key, f"应为数值，实际 {value!r}", source)

    try:
        figure = FigureSpec(
            name=str(doc.get('name', Path(path).stem)),
            vertices=np.array(vertices, dtype=float).reshape(-1, 3),
            closed=bool(doc.get('closed', True)),
            segment_duration=optional('segment_duration'),
            total_duration=optional('total_duration'),
            accel=optional('accel'),
            q46=tuple(v * scale for v in _numbers(doc.get('q46', [0, 0, 0]), 'q46', source, 3)),
            seed=tuple(v * scale for v in _numbers(doc.get('seed', [0, 0, 0]), 'seed', source, 3)),
        )
    except ValidationError as e:
        if e.source:
            raise
        raise ValidationError(e.field, e.reason, source) from e
    logger.debug(f"已加载图形 {figure.name}: {source}")
    return figure


def _parse_header(lines: List[str]) -> Dict[str, str]:
    header = {}
    for line in lines:
        body = line[1:].strip()
        if ':' in body:
            key, value = body.split(':', 1)
            header[key.strip()] = value.strip()
    return header


_LINE_RE = re.compile(r'line (\d+)')


def read_trajectory(path: PathLike) -> TrajectoryFile:
    """读取轨迹 CSV

    表头为 ``# key: value`` 注释行（format_version / model_id / profile /
    sample_period / joints / params），随后是列名行与数据行。

    Raises:
        ParseError: 空文件、列名缺失、数据行格式错误（带行号）
    """
    source = str(path)
    try:
        text = Path(path).read_text(encoding='utf-8')
    except FileNotFoundError:
        raise ParseError(None, "文件不存在", source)
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise ParseError(1, "文件为空", source)

    comments = []
    for line in lines:
        if not line.startswith('#'):
            break
        comments.append(line)
    header = _parse_header(comments)
    first_data_line = len(comments) + 2

    version = header.get('format_version', str(FORMAT_VERSION))
    if version != str(FORMAT_VERSION):
        raise ParseError(1, f"不支持的 format_version {version!r}", source)

    try:
        df = pd.read_csv(path, comment='#', float_precision='round_trip')
    except pd.errors.EmptyDataError:
        raise ParseError(len(comments) + 1, "缺少列名行", source)
    except pd.errors.ParserError as e:
        m = _LINE_RE.search(str(e))
        line = int(m.group(1)) if m else None
        raise ParseError(line, f"数据行格式错误: {e}", source)

    missing = [c for c in ['t'] + POSITION_COLUMNS if c not in df.columns]
    if missing:
        raise ParseError(len(comments) + 1, f"缺少列 {missing}", source)
    if df.empty:
        raise ParseError(first_data_line, "没有数据行", source)

    has_joints = all(c in df.columns for c in JOINT_COLUMNS)
    columns = ['t'] + POSITION_COLUMNS + (JOINT_COLUMNS if has_joints else [])
    values = df[columns].apply(pd.to_numeric, errors='coerce')
    bad = values.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad))
        raise ParseError(first_data_line + row, "数据行含非数值或缺失字段", source)

    data = values.to_numpy(dtype=float)
    t = data[:, 0]
    if 'sample_period' not in header and len(t) < 2:
        raise ParseError(1, "单样本文件需在表头给出 sample_period", source)
    try:
        sample_period = float(header['sample_period']) if 'sample_period' in header else float(t[1] - t[0])
        params = json.loads(header.get('params', '{}'))
    except ValueError as e:
        raise ParseError(1, f"表头解析失败: {e}", source)

    try:
        path_obj = TimedPath(t, data[:, 1:4], sample_period)
        joints = None
        if has_joints:
            joints = JointTrajectory(
                t=t, q=data[:, 4:10], model_id=header.get('model_id', ''), sample_period=sample_period
            )
    except ValidationError as e:
        raise ValidationError(e.field, e.reason, source) from e

    return TrajectoryFile(
        path=path_obj,
        joints=joints,
        model_id=header.get('model_id', ''),
        profile=header.get('profile', ''),
        params=params,
        format_version=FORMAT_VERSION,
    )
