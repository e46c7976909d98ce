"""`ablation` command: degenerate model variants through the clustering protocol."""

import logging
from functools import partial
from pathlib import Path

import pandas as pd

from app.commands.common import affinity_for, prepare_dataset, rank_blufs, solver_config
from app.schemas.run import CommandOptions, RunConfig
from app.schemas.solver import AblationCaseEnum
from app.services.eval_ops import protocol_cluster, report_frame
from app.services.solver_ops import ablation_variant, write_frame

logger = logging.getLogger(__name__)


def run(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """
    Оценить четыре варианта модели при s признаках.

    Артефакт: ablation.csv (case + столбцы отчета).
    """
    ds = prepare_dataset(cfg)
    blufs = solver_config(cfg, ds)
    _, s_hat = affinity_for(ds, blufs)
    m = min(blufs.s, ds.d)

    frames = []
    for case in AblationCaseEnum:
        variant = ablation_variant(blufs, case)
        report = protocol_cluster(
            ds,
            partial(rank_blufs, variant, s_hat),
            [m],
            repeats=cfg.eval.repeats,
            seeds=cfg.eval.seeds,
            method=case.value,
            workers=options.workers,
        )
        frame = report_frame(report.rows)
        frame.insert(0, "case", case.value)
        frames.append(frame)
        acc_row = report.rows[0]
        logger.info(f"Ablation {case.value}: ACC={acc_row.mean:.4f} ± {acc_row.std:.4f}")

    return [write_frame(pd.concat(frames, ignore_index=True), options.out / "ablation.csv")]
