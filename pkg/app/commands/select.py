"""`select` command: rank features and write the ranking with its solver trace."""

import logging
from pathlib import Path

from app.commands.common import affinity_for, prepare_dataset, solver_config
from app.schemas.run import CommandOptions, MethodEnum, RunConfig
from app.services.selection_ops import (
    baseline_ranking,
    feature_ranking,
    lapscore,
    selected_correlation,
    write_ranking,
)
from app.services.solver_ops import run_pam, trace_frame, write_frame

logger = logging.getLogger(__name__)


def run(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """
    Отбор признаков выбранным методом.

    Артефакты: ranking.csv, trace.csv (только blufs), selected_correlation.csv.
    """
    ds = prepare_dataset(cfg)
    blufs = solver_config(cfg, ds)
    artifacts = []

    if cfg.method == MethodEnum.BASELINE:
        ranking = baseline_ranking(ds.d)
    else:
        graph, s_hat = affinity_for(ds, blufs)
        if cfg.method == MethodEnum.LAPSCORE:
            ranking = lapscore(ds.features, graph, min(blufs.s, ds.d))
        else:
            state = run_pam(ds.features, s_hat, blufs)
            ranking = feature_ranking(state.W)
            artifacts.append(write_frame(trace_frame(state), options.out / "trace.csv"))

    artifacts.append(write_ranking(ranking, ds.names, options.out / "ranking.csv"))
    if ranking.selected:
        artifacts.append(
            write_frame(
                selected_correlation(ds, ranking).rename_axis("feature").reset_index(),
                options.out / "selected_correlation.csv",
            )
        )

    selected = [ds.names[i] for i in ranking.selected]
    logger.info(f"{cfg.method.value} selected {len(selected)} features: {selected}")
    return artifacts
