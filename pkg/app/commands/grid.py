"""`grid` command: sweep lambda, alpha, beta, mu over the log grid."""

import itertools
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from app.commands.common import affinity_for, prepare_dataset, solver_config
from app.core.exceptions import InvalidArgumentError, NumericalError
from app.models.dataset import Dataset
from app.models.graph import NormalizedAffinity
from app.schemas.run import CommandOptions, RunConfig
from app.schemas.solver import BlufsConfig
from app.services.eval_ops import acc, kmeans, nmi, run_cells
from app.services.selection_ops import feature_ranking, reduce
from app.services.solver_ops import run_pam, write_frame

logger = logging.getLogger(__name__)

# {10^-4, 10^-3, ..., 10^3}
GRID_VALUES = [10.0**e for e in range(-4, 4)]
PARAMS = ("lambda", "alpha", "beta", "mu")
GRID_COLUMNS = [*PARAMS, "acc_mean", "acc_std", "nmi_mean", "nmi_std", "iterations", "converged"]


def grid_cell(
    ds: Dataset, s_hat: NormalizedAffinity, base: BlufsConfig, params: tuple, seeds: list[int]
) -> dict:
    """
    Одна ячейка сетки: решение BLUFS и k-means ACC/NMI на s признаках.

    Численный сбой ячейки не прерывает сетку: метрики становятся NaN.
    """
    lam, alpha, beta, mu = params
    cfg = base.model_copy(update={"lambda_": lam, "alpha": alpha, "beta": beta, "mu": mu})
    row = dict(zip(PARAMS, params))
    try:
        state = run_pam(ds.features, s_hat, cfg)
    except NumericalError as e:
        logger.warning(f"Grid cell {row} failed: {e.message}")
        metrics = dict.fromkeys(("acc_mean", "acc_std", "nmi_mean", "nmi_std"), np.nan)
        return {**row, **metrics, "iterations": 0, "converged": False}

    reduced = reduce(ds, feature_ranking(state.W), min(cfg.s, ds.d))
    accs, nmis = [], []
    for seed in seeds:
        pred = kmeans(reduced.features, ds.class_count, seed)
        accs.append(acc(pred, ds.labels))
        nmis.append(nmi(pred, ds.labels))
    return {
        **row,
        "acc_mean": float(np.mean(accs)),
        "acc_std": float(np.std(accs)),
        "nmi_mean": float(np.mean(nmis)),
        "nmi_std": float(np.std(nmis)),
        "iterations": state.iter,
        "converged": state.converged,
    }


def _best(rows: list[dict]) -> dict:
    """Ячейка с наибольшим ACC (при равенстве - первая в порядке обхода)."""
    scored = [row for row in rows if np.isfinite(row["acc_mean"])]
    if not scored:
        raise NumericalError("Every grid cell failed numerically")
    return max(scored, key=lambda row: row["acc_mean"])


def run(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """
    Перебор сетки гиперпараметров.

    Полный режим - 8^4 ячеек. Режим --coarse: сначала mu = lambda = 1 и
    перебор (alpha, beta), затем лучшие (alpha, beta) и перебор (mu, lambda).

    Артефакты: grid.csv (все ячейки), best.csv (лучшая ячейка).
    """
    ds = prepare_dataset(cfg)
    if ds.labels is None:
        raise InvalidArgumentError("grid search scores clustering ACC and needs labels")
    blufs = solver_config(cfg, ds)
    _, s_hat = affinity_for(ds, blufs)
    seeds = cfg.eval.seeds

    def sweep(cells: list[tuple]) -> list[dict]:
        return run_cells(
            grid_cell, [(ds, s_hat, blufs, params, seeds) for params in cells], options.workers
        )

    if options.coarse:
        stage1 = sweep([(1.0, a, b, 1.0) for a, b in itertools.product(GRID_VALUES, repeat=2)])
        best1 = _best(stage1)
        logger.info(f"Coarse stage 1 best: alpha={best1['alpha']:g}, beta={best1['beta']:g}")
        stage2 = sweep(
            [(lam, best1["alpha"], best1["beta"], mu)
             for mu, lam in itertools.product(GRID_VALUES, repeat=2)]
        )
        rows = stage1 + stage2
    else:
        rows = sweep(list(itertools.product(GRID_VALUES, repeat=4)))

    best = _best(rows)
    frame = pd.DataFrame(rows, columns=GRID_COLUMNS)
    paths = [
        write_frame(frame, options.out / "grid.csv"),
        write_frame(pd.DataFrame([best], columns=GRID_COLUMNS), options.out / "best.csv"),
    ]
    logger.info(
        f"Grid best ACC {best['acc_mean']:.4f} at "
        + ", ".join(f"{name}={best[name]:g}" for name in PARAMS)
    )
    return paths
