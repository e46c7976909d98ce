"""`trace` command: solver trace and convergence curve for plotting."""

import logging
from pathlib import Path

from app.commands.common import affinity_for, prepare_dataset, solver_config
from app.core.exceptions import ConfigError
from app.schemas.run import CommandOptions, MethodEnum, RunConfig
from app.services.solver_ops import convergence_frame, run_pam, trace_frame, write_frame

logger = logging.getLogger(__name__)


def run(cfg: RunConfig, options: CommandOptions) -> list[Path]:
    """Запустить решатель и записать trace.csv и convergence.csv."""
    if cfg.method != MethodEnum.BLUFS:
        raise ConfigError("trace is only defined for method 'blufs'", key="method")

    ds = prepare_dataset(cfg)
    blufs = solver_config(cfg, ds)
    _, s_hat = affinity_for(ds, blufs)
    state = run_pam(ds.features, s_hat, blufs)

    if state.violations:
        logger.warning(
            f"{len(state.violations)} of {state.iter} iterations violated sufficient decrease"
        )
    return [
        write_frame(trace_frame(state), options.out / "trace.csv"),
        write_frame(convergence_frame(state), options.out / "convergence.csv"),
    ]
