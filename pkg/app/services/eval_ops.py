"""Evaluation: k-means, ACC, NMI, k-NN classification and the repeat protocol."""

import logging
from collections.abc import Callable, Iterable
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from app.core.exceptions import DataIOError, InvalidArgumentError
from app.models.dataset import Dataset
from app.models.ranking import FeatureRanking
from app.schemas.report import EvalReport, EvalRow, MetricEnum
from app.services.dataset_ops import split
from app.services.selection_ops import reduce

logger = logging.getLogger(__name__)

KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6

Ranker = Callable[[Dataset, int], FeatureRanking]


def run_cells(func: Callable, cells: Iterable[tuple], workers: int = 1) -> list:
    """
    Выполнить независимые ячейки эксперимента, сохраняя порядок результатов.

    Args:
        func: Функция ячейки
        cells: Аргументы ячеек
        workers: Размер пула (1 = последовательно, -1 = все ядра)
    """
    cells = list(cells)
    if workers == 1 or len(cells) <= 1:
        return [func(*cell) for cell in cells]
    return Parallel(n_jobs=workers, verbose=0)(delayed(func)(*cell) for cell in cells)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def kmeans(X: np.ndarray, c: int, seed: int) -> np.ndarray:
    """
    k-means (Lloyd, инициализация k-means++, один запуск на seed).

    Args:
        X: Матрица признаков d x n

    Raises:
        InvalidArgumentError: c < 1 или c > n
    """
    n = X.shape[1]
    if c < 1 or c > n:
        raise InvalidArgumentError(f"c must satisfy 1 <= c <= n={n}, got {c}")
    model = KMeans(
        n_clusters=c,
        init="k-means++",
        n_init=1,
        max_iter=KMEANS_MAX_ITER,
        tol=KMEANS_TOL,
        random_state=seed,
        algorithm="lloyd",
    )
    return model.fit_predict(np.ascontiguousarray(X.T)).astype(np.int64)


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise InvalidArgumentError(f"Label vectors differ in length: {a.size} vs {b.size}")
    if a.size == 0:
        raise InvalidArgumentError("Label vectors must not be empty")
    return a, b


def acc(pred: np.ndarray, truth: np.ndarray) -> float:
    """
    Точность кластеризации при наилучшей перестановке меток
    (венгерский алгоритм на таблице сопряженности).
    """
    pred, truth = _check_pair(pred, truth)
    table = contingency_matrix(truth, pred)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / truth.size


def nmi(a: np.ndarray, b: np.ndarray) -> float:
    """
    NMI = MI(a, b) / max(H(a), H(b)), натуральные логарифмы.

    Оба разбиения из одного кластера -> 1.0; ровно одно -> 0.0.
    """
    a, b = _check_pair(a, b)
    value = normalized_mutual_info_score(a, b, average_method="max")
    return float(np.clip(value, 0.0, 1.0))


def knn_predict(train: Dataset, test: Dataset, k: int) -> np.ndarray:
    """
    Предсказания k-NN: большинство среди k ближайших (евклидово расстояние).

    Равные расстояния - по меньшему индексу, равные голоса - меньшая метка.

    Raises:
        InvalidArgumentError: Нет меток, разные размерности или k > размера выборки
    """
    if train.labels is None:
        raise InvalidArgumentError("k-NN needs a labeled training set")
    if train.d != test.d:
        raise InvalidArgumentError(f"Feature dimensions differ: {train.d} vs {test.d}")
    if k < 1 or k > train.n:
        raise InvalidArgumentError(f"k must satisfy 1 <= k <= {train.n}, got {k}")

    dist = cdist(test.features.T, train.features.T, metric="euclidean")
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    votes = train.labels[nearest]
    minlength = int(train.labels.max()) + 1
    return np.array(
        [np.argmax(np.bincount(row, minlength=minlength)) for row in votes], dtype=np.int64
    )


def knn_classify(train: Dataset, test: Dataset, k: int) -> float:
    """Точность k-NN на тестовой выборке."""
    if test.labels is None:
        raise InvalidArgumentError("k-NN evaluation needs test labels")
    predicted = knn_predict(train, test, k)
    return float(np.mean(predicted == test.labels))


# ---------------------------------------------------------------------------
# Protocol
# ---------------------------------------------------------------------------


def _cluster_cell(ds: Dataset, seed: int) -> tuple[float, float]:
    pred = kmeans(ds.features, ds.class_count, seed)
    return acc(pred, ds.labels), nmi(pred, ds.labels)


def _classify_cell(ds: Dataset, fraction: float, seed: int, k: int) -> float:
    train, test = split(ds, fraction, seed)
    return knn_classify(train, test, k)


def _rows(feature_count: int, metric: MetricEnum, values: list[float]) -> EvalRow:
    values = np.asarray(values, dtype=np.float64)
    return EvalRow(
        feature_count=feature_count,
        metric=metric,
        mean=float(np.clip(values.mean(), 0.0, 1.0)),
        std=float(values.std()),
        repeats=values.size,
    )


def rank_for_counts(
    ds: Dataset, ranker: Ranker, feature_counts: list[int], workers: int = 1
) -> dict[int, FeatureRanking]:
    """
    Ранжирования для каждого числа признаков (на полном датасете).

    Raises:
        InvalidArgumentError: Число признаков вне [1, d]
    """
    counts = sorted(set(feature_counts))
    bad = [m for m in counts if m < 1 or m > ds.d]
    if bad:
        raise InvalidArgumentError(f"feature_counts {bad} outside [1, d={ds.d}]")
    rankings = run_cells(ranker, [(ds, m) for m in counts], workers)
    return dict(zip(counts, rankings))


def protocol_cluster(
    ds: Dataset,
    ranker: Ranker,
    feature_counts: list[int],
    repeats: int,
    seeds: list[int],
    method: str = "blufs",
    workers: int = 1,
) -> EvalReport:
    """
    Протокол кластеризации: для каждого числа признаков - сокращение
    датасета и по одному запуску k-means на seed; ACC/NMI как mean ± std.

    Raises:
        InvalidArgumentError: Нет меток, repeats != len(seeds), число признаков > d
    """
    if ds.labels is None:
        raise InvalidArgumentError("Clustering evaluation needs a labeled dataset")
    if repeats != len(seeds):
        raise InvalidArgumentError(f"repeats={repeats} but {len(seeds)} seeds given")

    rankings = rank_for_counts(ds, ranker, feature_counts, workers)
    reduced = {m: reduce(ds, rankings[m], m) for m in feature_counts}
    cells = [(reduced[m], seed) for m in feature_counts for seed in seeds]
    results = run_cells(_cluster_cell, cells, workers)

    rows = []
    for i, m in enumerate(feature_counts):
        chunk = results[i * repeats:(i + 1) * repeats]
        rows.append(_rows(m, MetricEnum.ACC, [r[0] for r in chunk]))
        rows.append(_rows(m, MetricEnum.NMI, [r[1] for r in chunk]))
        logger.debug(f"{method} m={m}: ACC={rows[-2].mean:.4f}, NMI={rows[-1].mean:.4f}")

    return EvalReport(method=method, dataset_name=ds.name, rows=rows)


def protocol_classify(
    ds: Dataset,
    ranker: Ranker,
    feature_counts: list[int],
    splits: int = 50,
    fraction: float = 0.5,
    seed: int = 0,
    k: int = 1,
    method: str = "blufs",
    workers: int = 1,
) -> EvalReport:
    """
    Протокол классификации: splits случайных разбиений (seed + r),
    k-NN на сокращенных признаках; точность как mean ± std.
    """
    if ds.labels is None:
        raise InvalidArgumentError("Classification evaluation needs a labeled dataset")

    rankings = rank_for_counts(ds, ranker, feature_counts, workers)
    reduced = {m: reduce(ds, rankings[m], m) for m in feature_counts}
    cells = [
        (reduced[m], fraction, seed + r, k) for m in feature_counts for r in range(splits)
    ]
    results = run_cells(_classify_cell, cells, workers)

    rows = [
        _rows(m, MetricEnum.CLS_ACC, results[i * splits:(i + 1) * splits])
        for i, m in enumerate(feature_counts)
    ]
    return EvalReport(method=method, dataset_name=ds.name, rows=rows)


# ---------------------------------------------------------------------------
# Report export
# ---------------------------------------------------------------------------

REPORT_COLUMNS = ["feature_count", "metric", "mean", "std", "repeats"]


def report_frame(rows: list[EvalRow]) -> pd.DataFrame:
    """Строки отчета как таблица."""
    return pd.DataFrame(
        [
            {
                "feature_count": row.feature_count,
                "metric": row.metric.value,
                "mean": row.mean,
                "std": row.std,
                "repeats": row.repeats,
            }
            for row in rows
        ],
        columns=REPORT_COLUMNS,
    )


def write_report(rows: list[EvalRow], path: str | Path) -> Path:
    """Записать строки отчета в CSV."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        report_frame(rows).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise DataIOError(f"Cannot write report {path}: {e}")
    return path
