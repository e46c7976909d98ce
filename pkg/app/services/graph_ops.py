"""Graph operations: k-NN Gaussian similarity, normalization, Laplacians."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.spatial.distance import cdist

from app.core.exceptions import DataIOError, InvalidArgumentError, NumericalError
from app.models.graph import NormalizedAffinity, SimilarityGraph

logger = logging.getLogger(__name__)


def knn_indices(points: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """
    k ближайших соседей каждой точки (без самой точки).

    Args:
        points: Матрица n x m (объекты строками)
        k: Число соседей

    Returns:
        (indices, distances): массивы n x k; равные расстояния - по меньшему индексу
    """
    dist = cdist(points, points, metric="euclidean")
    np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(dist, order, axis=1)


def build_similarity(X: np.ndarray, k: int = 10, sigma: float | None = None) -> SimilarityGraph:
    """
    Построить симметричный k-NN граф с гауссовыми весами.

    S_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)), если j в kNN(i) или i в kNN(j).

    Args:
        X: Матрица признаков d x n
        k: Число соседей (k < n)
        sigma: Ширина ядра; None = медиана расстояний до k соседей

    Raises:
        InvalidArgumentError: k >= n или sigma <= 0
    """
    n = X.shape[1]
    if k < 1 or k >= n:
        raise InvalidArgumentError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    if sigma is not None and sigma <= 0:
        raise InvalidArgumentError(f"sigma must be positive, got {sigma}")

    neighbors, distances = knn_indices(X.T, k)

    if sigma is None:
        sigma = float(np.median(distances))
        if sigma <= 0:
            logger.warning("All retained k-NN distances are zero, falling back to sigma=1")
            sigma = 1.0

    rows = np.repeat(np.arange(n), k)
    cols = neighbors.ravel()
    values = np.exp(-(distances.ravel() ** 2) / (2.0 * sigma**2))
    directed = sparse.csr_matrix((values, (rows, cols)), shape=(n, n))

    # Объединение отношений: значение симметрично, поэтому max(S, S^T) точен
    weights = sparse.csr_matrix(directed.maximum(directed.T))
    weights.eliminate_zeros()
    weights.sort_indices()

    logger.debug(f"Similarity graph: n={n}, k={k}, sigma={sigma:.4g}, nnz={weights.nnz}")
    return SimilarityGraph(weights=weights, k=k, sigma=sigma)


def normalize_affinity(graph: SimilarityGraph) -> NormalizedAffinity:
    """
    Нормировать граф: S_hat = D^-1/2 S D^-1/2.

    Raises:
        NumericalError: Изолированная вершина (нулевая степень)
    """
    degrees = graph.degrees
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise NumericalError(
            f"Vertex {int(isolated[0])} is isolated (degree 0); increase k or sigma",
            context={"isolated": isolated[:10].tolist()},
        )
    inv_root = sparse.diags(1.0 / np.sqrt(degrees))
    s_hat = sparse.csr_matrix(inv_root @ graph.weights @ inv_root)
    # Симметрия после округления
    s_hat = sparse.csr_matrix((s_hat + s_hat.T) / 2.0)
    return NormalizedAffinity(s_hat=s_hat, degrees=degrees)


def laplacian_of_p(P):
    """
    Лапласиан адаптивного графа L_P = D_P - (P + P^T)/2.

    D_P - диагональ сумм строк симметризованной матрицы (P + P^T)/2;
    для симметричной P это суммы строк P. Тогда
    sum_ij ||z_i - z_j||^2 P_ij = 2 Tr(Z^T L_P Z) для любой P >= 0.

    Args:
        P: Матрица n x n (scipy.sparse или numpy)

    Returns:
        Матрица того же типа (sparse -> csr)
    """
    if sparse.issparse(P):
        sym = (P + P.T) / 2.0
        degrees = np.asarray(sym.sum(axis=1)).ravel()
        return sparse.csr_matrix(sparse.diags(degrees) - sym)
    P = np.asarray(P, dtype=np.float64)
    sym = (P + P.T) / 2.0
    return np.diag(sym.sum(axis=1)) - sym


def export_triplets(graph: SimilarityGraph, path: str | Path) -> Path:
    """Выгрузить граф в CSV (i, j, value) для отладки."""
    path = Path(path)
    coo = graph.weights.tocoo()
    frame = pd.DataFrame({"i": coo.row, "j": coo.col, "value": coo.data})
    frame = frame.sort_values(["i", "j"], kind="stable")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise DataIOError(f"Cannot write graph triplets {path}: {e}")
    return path
