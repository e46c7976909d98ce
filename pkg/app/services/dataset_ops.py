"""Dataset operations: CSV ingestion, synthetic generation, scaling, splitting."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import StandardScaler

from app.core.exceptions import (
    DataFormatError,
    DataIOError,
    DataParseError,
    InvalidArgumentError,
)
from app.models.dataset import Dataset
from app.schemas.data import SyntheticKindEnum, SyntheticSpec

logger = logging.getLogger(__name__)

LABEL_COLUMN = "label"


def load_dataset(path: str | Path, format: str = "csv") -> Dataset:
    """
    Загрузить датасет из CSV (строка = объект, первая строка = заголовок).

    Args:
        path: Путь к файлу
        format: Формат файла (поддерживается только csv)

    Returns:
        Dataset: Признаки в ориентации d x n, метки из столбца `label`

    Raises:
        DataIOError: Файл не найден или не читается
        DataFormatError: Пустой файл или неподдерживаемый формат
        DataParseError: Рваная строка или нечисловая ячейка
    """
    path = Path(path)
    if format != "csv":
        raise DataFormatError(f"Unsupported dataset format: {format}")

    try:
        # Читаем как строки: пустая ячейка остается "", недостающая - NaN
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8"
        )
    except FileNotFoundError:
        raise DataIOError(f"Dataset file not found: {path}")
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"Dataset file is empty: {path}")
    except pd.errors.ParserError as e:
        raise DataParseError(f"Ragged row in {path}: {e}")
    except (OSError, UnicodeDecodeError) as e:
        raise DataIOError(f"Cannot read dataset {path}: {e}")

    if frame.shape[0] == 0:
        raise DataFormatError(f"Dataset file has a header but no rows: {path}")

    missing = frame.isna()
    if missing.to_numpy().any():
        row = int(np.flatnonzero(missing.any(axis=1).to_numpy())[0])
        # +2: заголовок и нумерация строк файла с 1
        raise DataParseError(
            f"Ragged row at line {row + 2} of {path}: expected {frame.shape[1]} fields",
            row=row + 2,
        )

    feature_columns = [col for col in frame.columns if col != LABEL_COLUMN]
    if not feature_columns:
        raise DataFormatError(f"Dataset has no feature columns: {path}")

    numeric = {}
    for col in frame.columns:
        values = pd.to_numeric(frame[col].str.strip(), errors="coerce")
        bad = values.isna().to_numpy()
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DataParseError(
                f"Non-numeric value {frame[col].iloc[row]!r} at line {row + 2}, "
                f"column {col!r} of {path}",
                row=row + 2,
                column=col,
            )
        numeric[col] = values.to_numpy(dtype=np.float64)

    features = np.vstack([numeric[col] for col in feature_columns])

    labels = None
    if LABEL_COLUMN in frame.columns:
        raw = numeric[LABEL_COLUMN]
        if np.any(raw < 0) or np.any(raw != np.round(raw)):
            raise DataParseError(
                f"Column {LABEL_COLUMN!r} of {path} must hold nonnegative integers",
                column=LABEL_COLUMN,
            )
        labels = raw.astype(np.int64)

    try:
        dataset = Dataset(
            features=features,
            labels=labels,
            feature_names=[str(col) for col in feature_columns],
            name=path.stem,
        )
    except ValueError as e:
        raise DataFormatError(f"Invalid dataset {path}: {e}")

    logger.info(
        f"Loaded dataset {dataset.name}: d={dataset.d}, n={dataset.n}, c={dataset.class_count}"
    )
    return dataset


def save_dataset(ds: Dataset, path: str | Path) -> Path:
    """
    Сохранить датасет в CSV (объекты строками, столбец label при наличии меток).

    Returns:
        Path: Путь к записанному файлу
    """
    path = Path(path)
    frame = pd.DataFrame(ds.features.T, columns=ds.names)
    if ds.labels is not None:
        frame[LABEL_COLUMN] = ds.labels
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise DataIOError(f"Cannot write dataset {path}: {e}")
    logger.debug(f"Dataset written to {path}")
    return path


def _informative_pair(spec: SyntheticSpec, rng: np.random.Generator):
    """Генерирует информативную пару признаков (2 x n) и метки."""
    m = spec.samples_per_class

    if spec.kind == SyntheticKindEnum.TWO_RINGS:
        # "Мишень": внутреннее и внешнее кольцо
        blocks = []
        for radius in (1.0, 3.0):
            angle = rng.uniform(0.0, 2.0 * np.pi, m)
            r = radius + rng.normal(0.0, spec.shape_noise, m)
            blocks.append(np.vstack([r * np.cos(angle), r * np.sin(angle)]))
        labels = np.repeat(np.arange(2), m)

    elif spec.kind == SyntheticKindEnum.TWO_BANANAS:
        t0 = rng.uniform(0.0, np.pi, m)
        t1 = rng.uniform(0.0, np.pi, m)
        upper = np.vstack([np.cos(t0), np.sin(t0)])
        lower = np.vstack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
        blocks = [
            upper + rng.normal(0.0, spec.shape_noise, (2, m)),
            lower + rng.normal(0.0, spec.shape_noise, (2, m)),
        ]
        labels = np.repeat(np.arange(2), m)

    else:
        # Центры на окружности со сдвигом pi/4: обе координаты информативны
        blocks = []
        for j in range(spec.blob_count):
            angle = 2.0 * np.pi * j / spec.blob_count + np.pi / 4.0
            center = 2.0 * np.array([[np.cos(angle)], [np.sin(angle)]])
            blocks.append(center + rng.normal(0.0, spec.shape_noise, (2, m)))
        labels = np.repeat(np.arange(spec.blob_count), m)

    return np.hstack(blocks), labels


def gen_synthetic(spec: SyntheticSpec) -> Dataset:
    """
    Сгенерировать синтетический датасет: признаки 0 и 1 информативны,
    остальные - независимый гауссов шум с std noise_sigma.

    Результат детерминирован при фиксированном seed.
    """
    rng = np.random.default_rng(spec.seed)
    informative, labels = _informative_pair(spec, rng)
    n = informative.shape[1]
    noise = rng.normal(0.0, spec.noise_sigma, (spec.noise_features, n))

    names = ["x0", "x1"] + [f"noise{i}" for i in range(spec.noise_features)]
    dataset = Dataset(
        features=np.vstack([informative, noise]),
        labels=labels,
        class_count=int(labels.max()) + 1,
        feature_names=names,
        name=f"synthetic-{spec.kind.value}",
    )
    logger.debug(f"Generated {dataset!r} with seed={spec.seed}")
    return dataset


def standardize(ds: Dataset) -> Dataset:
    """
    Z-нормализация каждого признака.

    Строки с нулевой дисперсией становятся нулевыми.
    """
    scaler = StandardScaler()
    scaled = scaler.fit_transform(ds.features.T).T
    return ds.model_copy(update={"features": _readonly(scaled)})


def split_indices(
    ds: Dataset, train_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Индексы разбиения на обучение/тест.

    Стратификация по классам, если в каждом классе не меньше 2 объектов
    и обе части вмещают все классы; иначе - простое случайное разбиение.

    Raises:
        InvalidArgumentError: Доля вне (0, 1), нет меток или пустая часть
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidArgumentError(
            f"train_fraction must lie in (0, 1), got {train_fraction}"
        )
    if ds.labels is None:
        raise InvalidArgumentError("split requires a labeled dataset")

    n = ds.n
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train > n - 1:
        raise InvalidArgumentError(
            f"train_fraction={train_fraction} leaves an empty part for n={n}"
        )

    _, counts = np.unique(ds.labels, return_counts=True)
    n_classes = counts.size
    stratify = None
    if counts.min() >= 2 and n_train >= n_classes and n - n_train >= n_classes:
        stratify = ds.labels
    else:
        logger.warning("Stratified split not possible, falling back to a random split")

    train_idx, test_idx = train_test_split(
        np.arange(n), train_size=n_train, random_state=seed, stratify=stratify
    )
    return np.sort(train_idx), np.sort(test_idx)


def subset(ds: Dataset, sample_idx: np.ndarray) -> Dataset:
    """Датасет из выбранных объектов (порядок индексов сохраняется)."""
    labels = None if ds.labels is None else ds.labels[sample_idx]
    return Dataset(
        features=ds.features[:, sample_idx],
        labels=labels,
        class_count=ds.class_count,
        feature_names=ds.feature_names,
        name=ds.name,
    )


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Разбить датасет на обучающую и тестовую части."""
    train_idx, test_idx = split_indices(ds, train_fraction, seed)
    return subset(ds, train_idx), subset(ds, test_idx)


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.float64)
    array.setflags(write=False)
    return array
