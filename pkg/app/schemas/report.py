"""Evaluation report schemas."""

from enum import Enum

from pydantic import BaseModel, Field


class MetricEnum(Enum):
    """Метрика качества."""

    ACC = "ACC"
    NMI = "NMI"
    CLS_ACC = "CLS_ACC"


class EvalRow(BaseModel):
    """Одна строка отчета: метрика при заданном числе признаков."""

    feature_count: int = Field(..., ge=1)
    metric: MetricEnum
    mean: float = Field(..., ge=0, le=1)
    std: float = Field(..., ge=0)
    repeats: int = Field(..., ge=1)


class EvalReport(BaseModel):
    """Отчет протокола оценки (среднее ± std по повторам)."""

    method: str
    dataset_name: str | None = None
    rows: list[EvalRow] = Field(default_factory=list)

    def rows_for(self, metric: MetricEnum) -> list[EvalRow]:
        """Строки одной метрики в порядке числа признаков."""
        return sorted(
            (row for row in self.rows if row.metric == metric),
            key=lambda row: row.feature_count,
        )

    def best_rows(self) -> list[EvalRow]:
        """
        Лучшая строка по каждой метрике (формат таблиц "mean ± std (count)").

        При равенстве средних выбирается меньшее число признаков.
        """
        best = []
        for metric in MetricEnum:
            rows = self.rows_for(metric)
            if rows:
                best.append(max(rows, key=lambda row: (row.mean, -row.feature_count)))
        return best
