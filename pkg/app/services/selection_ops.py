"""Selection operations: rankings from W, Laplacian Score baseline, reduction."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from app.core.exceptions import DataIOError, InvalidArgumentError
from app.models.dataset import Dataset
from app.models.graph import SimilarityGraph
from app.models.ranking import FeatureRanking
from app.models.solver import ProjectionMatrix

logger = logging.getLogger(__name__)


def feature_ranking(W: ProjectionMatrix) -> FeatureRanking:
    """
    Ранжирование признаков по нормам строк W.

    selected - ровно ненулевые строки W по убыванию нормы (при равенстве -
    меньший индекс); нулевые строки не выбираются никогда.
    """
    scores = W.row_norms
    support = W.support
    order = support[np.argsort(-scores[support], kind="stable")]
    if order.size == 0:
        logger.warning("W is identically zero, ranking selects no features")
    return FeatureRanking(scores=scores, selected=order.tolist(), method="blufs")


def laplacian_scores(X: np.ndarray, graph: SimilarityGraph) -> np.ndarray:
    """
    Laplacian Score каждого признака (меньше = лучше сохраняет локальность).

    f~ = f - (f^T D 1 / 1^T D 1) 1, score = f~^T L f~ / f~^T D f~, L = D - S.
    Признак с нулевой взвешенной дисперсией получает +inf.
    """
    S = graph.weights
    degrees = graph.degrees
    total = degrees.sum()

    centered = X - ((X @ degrees) / total)[:, None]
    # f~^T L f~ = f~^T D f~ - f~^T S f~
    spread = np.einsum("ij,ij->i", centered * degrees, centered)
    smooth = spread - np.einsum("ij,ij->i", centered, (S @ centered.T).T)

    scores = np.full(X.shape[0], np.inf)
    # Относительный порог: постоянный признак дает spread ~ ошибки округления
    scale = np.einsum("ij,ij->i", X * degrees, X)
    varying = spread > 1e-12 * np.maximum(scale, 1e-300)
    scores[varying] = smooth[varying] / spread[varying]
    return scores


def lapscore(X: np.ndarray, S: SimilarityGraph, m: int) -> FeatureRanking:
    """
    Базовый метод Laplacian Score: m признаков с наименьшим score.

    Raises:
        InvalidArgumentError: m вне [1, d]
    """
    d = X.shape[0]
    if m < 1 or m > d:
        raise InvalidArgumentError(f"m must satisfy 1 <= m <= d={d}, got {m}")
    scores = laplacian_scores(X, S)
    finite = np.flatnonzero(np.isfinite(scores))
    order = finite[np.argsort(scores[finite], kind="stable")]
    if order.size < m:
        logger.warning(
            f"Only {order.size} features have a finite Laplacian Score, requested {m}"
        )
    return FeatureRanking(
        scores=scores, selected=order[:m].tolist(), higher_is_better=False, method="lapscore"
    )


def baseline_ranking(d: int) -> FeatureRanking:
    """Тривиальное "ранжирование": все признаки в исходном порядке."""
    return FeatureRanking(scores=np.ones(d), selected=list(range(d)), method="baseline")


def reduce(ds: Dataset, ranking: FeatureRanking, m: int) -> Dataset:
    """
    Оставить m лучших признаков по ранжированию.

    Если выбранных признаков меньше m, список дополняется признаками с
    наибольшими оценками вне selected (с предупреждением).

    Raises:
        InvalidArgumentError: m < 1 или ранжированных признаков меньше m
    """
    if ranking.d != ds.d:
        raise InvalidArgumentError(
            f"Ranking covers d={ranking.d} features, dataset has d={ds.d}"
        )
    if m < 1:
        raise InvalidArgumentError(f"m must be positive, got {m}")

    if m <= len(ranking.selected):
        keep = ranking.selected[:m]
    else:
        order = ranking.order()
        if m > len(order):
            raise InvalidArgumentError(
                f"Requested {m} features, only {len(order)} are ranked"
            )
        logger.warning(
            f"Ranking selected {len(ranking.selected)} features, padding to {m} "
            f"from sub-threshold scores"
        )
        keep = order[:m]

    return Dataset(
        features=ds.features[keep],
        labels=ds.labels,
        class_count=ds.class_count,
        feature_names=[ds.names[i] for i in keep],
        name=ds.name,
    )


def ranking_frame(ranking: FeatureRanking, names: list[str]) -> pd.DataFrame:
    """Таблица ранжирования: feature_index, feature_name, score, selected_flag."""
    chosen = set(ranking.selected)
    return pd.DataFrame(
        {
            "feature_index": np.arange(ranking.d),
            "feature_name": names,
            "score": ranking.scores,
            "selected_flag": [int(i in chosen) for i in range(ranking.d)],
        }
    )


def selected_correlation(ds: Dataset, ranking: FeatureRanking) -> pd.DataFrame:
    """Матрица корреляций Пирсона выбранных признаков (в порядке ранжирования)."""
    names = [ds.names[i] for i in ranking.selected]
    frame = pd.DataFrame(ds.features[ranking.selected].T, columns=names)
    return frame.corr(method="pearson")


def write_ranking(ranking: FeatureRanking, names: list[str], path: str | Path) -> Path:
    """Записать ранжирование в CSV."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        ranking_frame(ranking, names).to_csv(
            path, index=False, float_format="%.17g", lineterminator="\n"
        )
    except OSError as e:
        raise DataIOError(f"Cannot write ranking {path}: {e}")
    logger.debug(f"Ranking written to {path}")
    return path
