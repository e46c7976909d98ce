"""Dataset model."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class Dataset(BaseModel):
    """
    Модель датасета.

    features хранится в ориентации d x n (строки = признаки, столбцы = объекты).
    Массивы после создания доступны только для чтения.
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    class_count: int | None = None
    feature_names: list[str] | None = None
    name: str | None = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="before")
    @classmethod
    def coerce_arrays(cls, data: Any) -> Any:
        """Приводит массивы к float64/int64 и выводит число классов из меток."""
        if not isinstance(data, dict):
            return data
        data = dict(data)

        features = np.array(data.get("features"), dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(1, -1)
        features.setflags(write=False)
        data["features"] = features

        labels = data.get("labels")
        if labels is not None:
            labels = np.array(labels).reshape(-1)
            if labels.size and not np.all(np.equal(np.mod(labels, 1), 0)):
                raise ValueError("labels must be integers")
            labels = labels.astype(np.int64)
            labels.setflags(write=False)
            data["labels"] = labels
            if data.get("class_count") is None and labels.size:
                # Без явного c каждый класс из [0, c) должен встречаться
                c = int(labels.max()) + 1
                if labels.min() >= 0 and np.unique(labels).size != c:
                    raise ValueError(
                        "labels skip a class in [0, c); declare class_count explicitly"
                    )
                data["class_count"] = c
        return data

    @model_validator(mode="after")
    def check_invariants(self):
        """Проверяет инварианты датасета."""
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        d, n = self.features.shape
        if d < 1:
            raise ValueError("dataset must have at least one feature")
        if n < 2:
            raise ValueError("dataset must have at least two samples")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain NaN or Inf")

        if self.labels is not None:
            if self.labels.shape[0] != n:
                raise ValueError(f"labels length {self.labels.shape[0]} != n={n}")
            c = self.class_count
            if self.labels.min() < 0 or self.labels.max() >= c:
                raise ValueError(f"labels must lie in [0, {c})")
        if self.class_count is not None and self.class_count < 1:
            raise ValueError("class_count must be positive")
        if self.feature_names is not None and len(self.feature_names) != d:
            raise ValueError(f"feature_names length {len(self.feature_names)} != d={d}")
        return self

    @property
    def d(self) -> int:
        """Число признаков."""
        return self.features.shape[0]

    @property
    def n(self) -> int:
        """Число объектов."""
        return self.features.shape[1]

    @property
    def names(self) -> list[str]:
        """Имена признаков (по умолчанию f0, f1, ...)."""
        if self.feature_names is not None:
            return list(self.feature_names)
        return [f"f{i}" for i in range(self.d)]

    def __repr__(self):
        return f"<Dataset(name={self.name}, d={self.d}, n={self.n}, c={self.class_count})>"
