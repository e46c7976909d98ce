"""Pytest configuration and fixtures."""

import json
import logging

import numpy as np
import pytest

from app.models.dataset import Dataset
from app.schemas.data import SyntheticKindEnum, SyntheticSpec
from app.schemas.solver import BlufsConfig
from app.services.dataset_ops import gen_synthetic, standardize
from app.services.graph_ops import build_similarity, normalize_affinity


@pytest.fixture(autouse=True)
def restore_root_logger():
    """Возвращает обработчики root logger после тестов, вызывающих setup_logging."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def rng():
    """Генератор случайных чисел с фиксированным seed."""
    return np.random.default_rng(0)


@pytest.fixture
def small_dataset(rng):
    """Небольшой размеченный датасет: d=5, n=30, три класса."""
    labels = np.repeat(np.arange(3), 10)
    features = rng.normal(size=(5, 30)) + labels
    return Dataset(features=features, labels=labels, name="small")


@pytest.fixture
def blobs_spec():
    """Спецификация двух гауссовых облаков с шумовыми признаками."""
    return SyntheticSpec(
        kind=SyntheticKindEnum.GAUSSIAN_BLOBS,
        samples_per_class=40,
        noise_features=5,
        noise_sigma=1.0,
        seed=0,
    )


@pytest.fixture
def blobs_dataset(blobs_spec):
    """Стандартизованный датасет двух облаков (признаки 0 и 1 информативны)."""
    return standardize(gen_synthetic(blobs_spec))


@pytest.fixture
def blobs_affinity(blobs_dataset):
    """k-NN граф облаков и его нормировка."""
    graph = build_similarity(blobs_dataset.features, k=8)
    return graph, normalize_affinity(graph)


@pytest.fixture
def solver_config():
    """Конфигурация решателя для небольших задач."""
    return BlufsConfig(s=2, k=8, n_clusters=2, outer_max_iter=30)


@pytest.fixture
def write_config(tmp_path):
    """Фабрика JSON-конфигураций во временной директории."""

    def _write(document: dict, name: str = "config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write
