"""Solver state models: adaptive graph P, projection W, pseudo-labels Y."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import sparse

ROW_SUM_TOL = 1e-9
BALL_TOL = 1e-9


class AdaptiveGraph(BaseModel):
    """Адаптивный граф P: строки на симплексе, не более k ненулей в строке."""

    P: sparse.csr_matrix
    k: int

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_invariants(self):
        """Проверяет неотрицательность, суммы строк и разреженность."""
        P = self.P
        n = P.shape[0]
        if P.shape != (n, n):
            raise ValueError("P must be square")
        if P.nnz and P.data.min() < 0:
            raise ValueError("P must be entrywise nonnegative")
        row_sums = np.asarray(P.sum(axis=1)).ravel()
        if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOL):
            raise ValueError("every row of P must sum to 1")
        if n and np.diff(P.indptr).max() > self.k:
            raise ValueError(f"a row of P has more than k={self.k} nonzeros")
        return self

    @property
    def n(self) -> int:
        """Число объектов."""
        return self.P.shape[0]


class ProjectionMatrix(BaseModel):
    """
    Матрица проекции W (d x c) с ограничением ||W||_{2,0} <= budget.

    budget = s внутри итераций; при отложенной проекции (абляция) budget = d.
    """

    W: np.ndarray
    budget: int

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_invariants(self):
        """Проверяет число ненулевых строк."""
        if self.W.ndim != 2:
            raise ValueError("W must be a d x c matrix")
        if self.support.size > self.budget:
            raise ValueError(
                f"W has {self.support.size} nonzero rows, budget is {self.budget}"
            )
        return self

    @property
    def support(self) -> np.ndarray:
        """Индексы ненулевых строк (точный ноль = строка не выбрана)."""
        return np.flatnonzero(np.any(self.W != 0.0, axis=1))

    @property
    def row_norms(self) -> np.ndarray:
        """Евклидовы нормы строк."""
        return np.linalg.norm(self.W, axis=1)


class PseudoLabels(BaseModel):
    """Непрерывные псевдометки Y (n x c) внутри шара ||Y||_F <= rho."""

    Y: np.ndarray
    rho: float
    inner_iterations: int = 0

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_invariants(self):
        """Проверяет принадлежность шару Фробениуса и конечность."""
        if self.Y.ndim != 2:
            raise ValueError("Y must be an n x c matrix")
        if not np.all(np.isfinite(self.Y)):
            raise ValueError("Y contains non-finite values")
        if np.linalg.norm(self.Y) > self.rho + BALL_TOL:
            raise ValueError(f"||Y||_F exceeds rho={self.rho}")
        return self

    @property
    def orthogonality_residual(self) -> float:
        """Невязка ||Y^T Y - I||_F."""
        c = self.Y.shape[1]
        return float(np.linalg.norm(self.Y.T @ self.Y - np.eye(c)))


class TraceRow(BaseModel):
    """Строка трассы решателя (одна внешняя итерация)."""

    iter: int
    f: float
    orthogonality: float
    delta_q: float
    support_size: int
    inner_iterations: int
    descent_ok: bool
    violating_block: str | None = None


class SolverState(BaseModel):
    """Состояние Q = (P, W, Y) и история целевой функции."""

    P: AdaptiveGraph
    W: ProjectionMatrix
    Y: PseudoLabels
    iter: int = 0
    objective_history: list[float] = Field(default_factory=list)
    trace: list[TraceRow] = Field(default_factory=list)
    converged: bool = False

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_dimensions(self):
        """Проверяет согласованность размеров P, W, Y."""
        n = self.P.n
        if self.Y.Y.shape[0] != n:
            raise ValueError(f"Y has {self.Y.Y.shape[0]} rows, P has {n}")
        if self.W.W.shape[1] != self.Y.Y.shape[1]:
            raise ValueError("W and Y must have the same number of columns")
        return self

    @property
    def violations(self) -> list[TraceRow]:
        """Итерации, нарушившие неравенство достаточного убывания."""
        return [row for row in self.trace if not row.descent_ok]
