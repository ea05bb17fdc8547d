"""共享 fixture：随包示例模型、合成模型、小图形"""

import pytest

from armtraj.config import SAMPLE_MODEL_PATH
from armtraj.kinematics import RobotModel
from armtraj.reader import load_model
from armtraj.trajectory import FigureSpec


@pytest.fixture(scope='session')
def sample_model() -> RobotModel:
    return load_model(SAMPLE_MODEL_PATH)


@pytest.fixture
def synthetic_model() -> RobotModel:
    """连杆长度互不相同的合成模型，便于从位置反推是哪一段"""
    return RobotModel.table1([100.0, 200.0, 50.0, 150.0, 40.0], model_id='synthetic')


@pytest.fixture
def square() -> FigureSpec:
    """边长 100 mm、每边 2 s 的正方形（x = 350 平面）"""
    return FigureSpec(
        name='square',
        vertices=[(350, -50, 450), (350, 50, 450), (350, 50, 550), (350, -50, 550)],
        closed=True,
        segment_duration=2.0,
    )
