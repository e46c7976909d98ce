"""Feature ranking model."""

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class FeatureRanking(BaseModel):
    """
    Ранжирование признаков.

    selected упорядочен от лучшего к худшему; higher_is_better задает,
    в какую сторону читать scores (нормы строк W - больше лучше,
    Laplacian Score - меньше лучше).
    """

    scores: np.ndarray
    selected: list[int]
    higher_is_better: bool = True
    method: str = "blufs"

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def check_invariants(self):
        """Проверяет уникальность и диапазон выбранных индексов."""
        d = self.scores.shape[0]
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("selected indices must be unique")
        if any(i < 0 or i >= d for i in self.selected):
            raise ValueError(f"selected indices must lie in [0, {d})")
        return self

    @property
    def d(self) -> int:
        """Число признаков исходного датасета."""
        return self.scores.shape[0]

    def order(self) -> list[int]:
        """
        Полный порядок признаков: сначала selected, затем остальные
        конечные по убыванию качества (при равенстве - меньший индекс).
        """
        chosen = set(self.selected)
        rest = [i for i in range(self.d) if i not in chosen and np.isfinite(self.scores[i])]
        key = -self.scores[rest] if self.higher_is_better else self.scores[rest]
        rest_sorted = [rest[j] for j in np.argsort(key, kind="stable")]
        return list(self.selected) + rest_sorted
