"""Similarity graph models."""

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import sparse


class SimilarityGraph(BaseModel):
    """Симметричный k-NN граф с гауссовыми весами."""

    weights: sparse.csr_matrix
    k: int
    sigma: float

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_invariants(self):
        """
        Проверяет симметричность, нулевую диагональ и диапазон весов.

        Число ненулей ограничено суммарно (nnz <= 2kn), а не построчно: после
        симметризации вершина-хаб, попавшая в k-NN многих точек, имеет больше
        2k соседей, но каждое ребро порождено одним из kn отношений k-NN.
        """
        S = self.weights
        if S.shape[0] != S.shape[1]:
            raise ValueError("similarity matrix must be square")
        if (S != S.T).nnz != 0:
            raise ValueError("similarity matrix must be exactly symmetric")
        if np.any(S.diagonal() != 0):
            raise ValueError("similarity matrix must have a zero diagonal")
        if S.nnz and (S.data.min() <= 0 or S.data.max() > 1):
            raise ValueError("similarity weights must lie in (0, 1]")
        # Объединение k-NN отношений: в сумме не более 2kn ненулей
        if S.nnz > 2 * self.k * S.shape[0]:
            raise ValueError(f"graph has more than 2kn={2 * self.k * S.shape[0]} entries")
        return self

    @property
    def n(self) -> int:
        """Число вершин."""
        return self.weights.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        """Степени вершин D_ii = sum_j S_ij."""
        return np.asarray(self.weights.sum(axis=1)).ravel()


class NormalizedAffinity(BaseModel):
    """Нормированная матрица сходства S_hat = D^-1/2 S D^-1/2 и степени D."""

    s_hat: sparse.csr_matrix
    degrees: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_invariants(self):
        """Проверяет размеры и положительность степеней."""
        n = self.s_hat.shape[0]
        if self.s_hat.shape != (n, n) or self.degrees.shape != (n,):
            raise ValueError("s_hat must be n x n and degrees of length n")
        if np.any(self.degrees <= 0):
            raise ValueError("degrees must be positive")
        return self

    @property
    def n(self) -> int:
        """Число вершин."""
        return self.s_hat.shape[0]

    def laplacian(self) -> sparse.csr_matrix:
        """Нормированный лапласиан L = I - S_hat."""
        return sparse.identity(self.n, format="csr") - self.s_hat

    def similarity(self) -> sparse.csr_matrix:
        """Восстанавливает S = D^1/2 S_hat D^1/2."""
        root = sparse.diags(np.sqrt(self.degrees))
        return sparse.csr_matrix(root @ self.s_hat @ root)
