"""Solver configuration schemas."""

from enum import Enum

from pydantic import BaseModel, Field, ConfigDict


class AblationCaseEnum(Enum):
    """Вырожденные версии модели для абляции."""

    FEATURE_ONLY = "feature_only"
    CLUSTERING_ONLY = "clustering_only"
    NO_GRAPH = "no_graph"
    FULL = "full"


class BlufsConfig(BaseModel):
    """Гиперпараметры решателя BLUFS."""

    lambda_: float = Field(1.0, ge=0, alias="lambda")
    alpha: float = Field(1.0, ge=0)
    beta: float = Field(1.0, ge=0)
    mu: float = Field(1.0, gt=0)
    s: int = Field(..., ge=1, description="Бюджет признаков (ограничение l2,0)")
    k: int = Field(10, ge=1, description="Число соседей в графах")
    sigma: float | None = Field(
        None, gt=0, description="Ширина гауссова ядра; None = медиана k-NN расстояний"
    )
    n_clusters: int | None = Field(
        None, ge=1, description="Число кластеров c; None = из меток датасета"
    )
    tau1: float = Field(1e-2, gt=0)
    tau2: float = Field(1e-2, gt=0)
    tau3: float = Field(1e-2, gt=0)
    theta: float = Field(1.0, gt=0)
    rho: float | None = Field(None, gt=0, description="Радиус шара; None = sqrt(c)")
    outer_max_iter: int = Field(50, ge=1)
    outer_tol: float = Field(1e-4, gt=0)
    inner_max_iter: int = Field(100, ge=1)
    inner_tol: float = Field(1e-6, gt=0)
    seed: int = 0

    # Переключатели абляции
    update_labels: bool = True
    project_in_loop: bool = True

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    @property
    def tau_min(self) -> float:
        """min{tau1, tau2, tau3} из неравенства достаточного убывания."""
        return min(self.tau1, self.tau2, self.tau3)

    def resolved_rho(self, n_clusters: int) -> float:
        """Радиус шара Фробениуса (по умолчанию sqrt(c))."""
        if self.rho is not None:
            return self.rho
        return float(n_clusters) ** 0.5
