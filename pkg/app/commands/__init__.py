"""CLI commands and their dispatch."""

import logging
from collections.abc import Callable
from pathlib import Path

from app.commands import ablation, evaluate, grid, select, synth, trace
from app.commands.common import write_metadata
from app.schemas.run import CommandEnum, CommandOptions, RunConfig

logger = logging.getLogger(__name__)

COMMANDS: dict[CommandEnum, Callable[[RunConfig, CommandOptions], list[Path]]] = {
    CommandEnum.SYNTH: synth.run,
    CommandEnum.SELECT: select.run,
    CommandEnum.EVAL_CLUSTER: evaluate.run_cluster,
    CommandEnum.EVAL_CLASSIFY: evaluate.run_classify,
    CommandEnum.GRID: grid.run,
    CommandEnum.TRACE: trace.run,
    CommandEnum.ABLATION: ablation.run,
}


def run_command(cmd: CommandEnum | str, cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """
    Выполнить команду и записать metadata.json рядом с ее артефактами.

    Returns:
        list[Path]: Записанные файлы (включая metadata.json)
    """
    cmd = CommandEnum(cmd)
    logger.info(f"Running {cmd.value} on {cfg.resolved_dataset_name} -> {options.out}")
    artifacts = COMMANDS[cmd](cfg, options)
    metadata = write_metadata(cfg, cmd.value, artifacts, options.out)
    for path in artifacts:
        logger.info(f"Artifact written: {path}")
    return [*artifacts, metadata]
