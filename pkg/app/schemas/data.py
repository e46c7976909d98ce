"""Synthetic dataset schemas."""

from enum import Enum

from pydantic import BaseModel, Field, ConfigDict


class SyntheticKindEnum(Enum):
    """Форма информативной пары признаков."""

    TWO_RINGS = "two_rings"
    TWO_BANANAS = "two_bananas"
    GAUSSIAN_BLOBS = "gaussian_blobs"


class SyntheticSpec(BaseModel):
    """Параметры синтетического датасета: 2 информативных признака + шум."""

    kind: SyntheticKindEnum
    samples_per_class: int = Field(200, ge=1)
    noise_features: int = Field(7, ge=0)
    noise_sigma: float = Field(1.0, gt=0)
    seed: int = 0
    # Разброс точек внутри информативной формы
    shape_noise: float = Field(0.1, ge=0)
    # Только для gaussian_blobs
    blob_count: int = Field(2, ge=2, le=16)

    model_config = ConfigDict(extra="forbid", frozen=True)

    @property
    def feature_count(self) -> int:
        """Общее число признаков."""
        return 2 + self.noise_features
