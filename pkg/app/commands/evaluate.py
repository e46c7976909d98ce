"""`eval-cluster` and `eval-classify` commands: the repeat/average protocols."""

import logging
from pathlib import Path

from app.commands.common import (
    build_metadata,
    make_ranker,
    prepare_dataset,
    solver_config,
    write_json,
)
from app.schemas.report import EvalReport
from app.schemas.run import CommandOptions, RunConfig
from app.services.eval_ops import protocol_classify, protocol_cluster, write_report

logger = logging.getLogger(__name__)

ARTIFACTS = ["report.csv", "summary.csv", "report.json"]


def _write(cfg: RunConfig, command: str, report: EvalReport, out: Path) -> list[Path]:
    """Записать отчет: полная таблица, лучшие строки и JSON с метаданными."""
    paths = [
        write_report(report.rows, out / "report.csv"),
        write_report(report.best_rows(), out / "summary.csv"),
    ]
    document = {
        "metadata": build_metadata(cfg, command, ARTIFACTS).model_dump(mode="json"),
        "report": report.model_dump(mode="json"),
        "best": [row.model_dump(mode="json") for row in report.best_rows()],
    }
    paths.append(write_json(document, out / "report.json"))

    for row in report.best_rows():
        logger.info(
            f"{report.method} best {row.metric.value}: "
            f"{100 * row.mean:.2f} ± {100 * row.std:.2f} ({row.feature_count})"
        )
    return paths


def run_cluster(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """Протокол кластеризации (k-means, ACC/NMI)."""
    ds = prepare_dataset(cfg)
    blufs = solver_config(cfg, ds)
    ranker, counts = make_ranker(cfg, ds, blufs)
    report = protocol_cluster(
        ds,
        ranker,
        counts,
        repeats=cfg.eval.repeats,
        seeds=cfg.eval.seeds,
        method=cfg.method.value,
        workers=options.workers,
    )
    return _write(cfg, "eval-cluster", report, options.out)


def run_classify(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """Протокол классификации (k-NN на случайных разбиениях)."""
    ds = prepare_dataset(cfg)
    blufs = solver_config(cfg, ds)
    ranker, counts = make_ranker(cfg, ds, blufs)
    report = protocol_classify(
        ds,
        ranker,
        counts,
        splits=cfg.eval.splits,
        fraction=cfg.eval.split_fraction,
        seed=blufs.seed,
        k=cfg.eval.knn_k,
        method=cfg.method.value,
        workers=options.workers,
    )
    return _write(cfg, "eval-classify", report, options.out)
