"""Run configuration schemas."""

from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ConfigDict, field_validator, model_validator

from app.schemas.data import SyntheticSpec
from app.schemas.solver import BlufsConfig


class MethodEnum(Enum):
    """Метод ранжирования признаков."""

    BLUFS = "blufs"
    LAPSCORE = "lapscore"
    BASELINE = "baseline"


class CommandEnum(Enum):
    """Команды CLI."""

    SYNTH = "synth"
    SELECT = "select"
    EVAL_CLUSTER = "eval-cluster"
    EVAL_CLASSIFY = "eval-classify"
    GRID = "grid"
    TRACE = "trace"
    ABLATION = "ablation"


class EvalSettings(BaseModel):
    """Параметры протокола оценки."""

    feature_counts: list[int] = Field(
        default_factory=lambda: list(range(10, 101, 10)), min_length=1
    )
    repeats: int = Field(10, ge=1)
    seeds: list[int] | None = None
    split_fraction: float = Field(0.5, gt=0, lt=1)
    splits: int = Field(50, ge=1)
    knn_k: int = Field(1, ge=1)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_counts_and_seeds(self):
        """Проверяет положительность чисел признаков и согласованность seeds."""
        if any(count < 1 for count in self.feature_counts):
            raise ValueError("feature_counts must be positive")
        if self.seeds is not None:
            if not self.seeds:
                raise ValueError("seeds must not be empty")
            if "repeats" in self.model_fields_set and self.repeats != len(self.seeds):
                raise ValueError("repeats must equal the number of seeds")
            self.repeats = len(self.seeds)
        return self


class RunConfig(BaseModel):
    """Полная конфигурация запуска."""

    dataset: str | SyntheticSpec
    dataset_name: str | None = None
    method: MethodEnum = MethodEnum.BLUFS
    standardize: bool = True
    output_dir: str = "results"
    blufs: BlufsConfig
    eval: EvalSettings = Field(default_factory=EvalSettings)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="before")
    @classmethod
    def lift_solver_keys(cls, data: Any) -> Any:
        """Переносит ключи решателя с верхнего уровня в секцию blufs."""
        if not isinstance(data, dict):
            return data
        solver_keys = set()
        for name, field in BlufsConfig.model_fields.items():
            solver_keys.add(name)
            if field.alias:
                solver_keys.add(field.alias)

        data = dict(data)
        blufs = dict(data.get("blufs") or {})
        for key in list(data):
            if key in solver_keys:
                blufs[key] = data.pop(key)
        data["blufs"] = blufs
        return data

    @model_validator(mode="after")
    def resolve_seeds(self):
        """Заполняет seeds протокола от seed решателя, если они не заданы."""
        if self.eval.seeds is None:
            start = self.blufs.seed
            self.eval.seeds = list(range(start, start + self.eval.repeats))
        return self

    @property
    def resolved_dataset_name(self) -> str:
        """Имя датасета для отчетов."""
        if self.dataset_name:
            return self.dataset_name
        if isinstance(self.dataset, SyntheticSpec):
            return f"synthetic-{self.dataset.kind.value}"
        return self.dataset.replace("\\", "/").rsplit("/", 1)[-1].rsplit(".", 1)[0]


class CommandOptions(BaseModel):
    """Параметры запуска команды, не входящие в конфигурацию."""

    out: Path
    workers: int = Field(1, ge=-1, description="Размер пула; -1 = все ядра")
    coarse: bool = False

    @field_validator("workers")
    @classmethod
    def check_workers(cls, v: int) -> int:
        """Запрещает пустой пул."""
        if v == 0:
            raise ValueError("workers must be positive or -1")
        return v
