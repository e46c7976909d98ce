"""`synth` command: write a generated dataset as CSV."""

import logging
from pathlib import Path

from app.core.exceptions import ConfigError
from app.schemas.data import SyntheticSpec
from app.schemas.run import CommandOptions, RunConfig
from app.services.dataset_ops import gen_synthetic, save_dataset

logger = logging.getLogger(__name__)


def run(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """
    Сгенерировать синтетический датасет и сохранить его без стандартизации.

    Raises:
        ConfigError: dataset задан путем, а не синтетической спецификацией
    """
    if not isinstance(cfg.dataset, SyntheticSpec):
        raise ConfigError("synth needs a synthetic dataset spec", key="dataset")

    ds = gen_synthetic(cfg.dataset)
    path = save_dataset(ds, options.out / f"{cfg.resolved_dataset_name}.csv")
    logger.info(f"Synthetic dataset {ds.name} (d={ds.d}, n={ds.n}) written to {path}")
    return [path]
