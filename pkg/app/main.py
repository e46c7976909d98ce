"""Command-line entry point: python -m app.main <command> --config <path>."""

import argparse
import logging
import sys
import time
from pathlib import Path

from app import __version__
from app.commands import run_command
from app.commands.common import parse_config
from app.core.config import settings
from app.core.exceptions import BlufsError, ConfigError
from app.core.logging_config import setup_logging
from app.schemas.run import CommandEnum, CommandOptions

logger = logging.getLogger(__name__)

# Код выхода для непредвиденных ошибок
EXIT_INTERNAL = 4
EXIT_IO = 2


class ArgumentParser(argparse.ArgumentParser):
    """argparse с ошибками использования в виде ConfigError (код выхода 1)."""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    """Парсер аргументов командной строки."""
    parser = ArgumentParser(
        prog="blufs", description="Sparse unsupervised feature selection toolkit"
    )
    parser.add_argument("command", choices=[cmd.value for cmd in CommandEnum])
    parser.add_argument("--config", required=True, type=Path, help="Run config or metadata.json")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--seed", type=int, default=None, help="Override blufs.seed")
    parser.add_argument(
        "--workers", type=int, default=None, help="Worker pool size (-1 = all cores)"
    )
    parser.add_argument(
        "--no-standardize", action="store_true", help="Skip per-feature z-scoring"
    )
    parser.add_argument(
        "--coarse", action="store_true", help="Grid: two 8x8 slices instead of 8^4 cells"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _run(argv: list[str] | None) -> list[Path]:
    args = build_parser().parse_args(argv)
    cfg = parse_config(
        args.config,
        seed=args.seed,
        standardize=False if args.no_standardize else None,
    )

    workers = args.workers if args.workers is not None else (settings.BLUFS_WORKERS or -1)
    if workers == 0 or workers < -1:
        raise ConfigError(f"--workers must be positive or -1, got {workers}", key="workers")

    options = CommandOptions(
        out=args.out if args.out is not None else Path(cfg.output_dir),
        workers=workers,
        coarse=args.coarse,
    )
    return run_command(args.command, cfg, options)


def main(argv: list[str] | None = None) -> int:
    """
    Точка входа CLI.

    Returns:
        int: 0 при успехе; 1 - конфигурация/аргументы, 2 - ввод-вывод,
        3 - численный сбой, 4 - непредвиденная ошибка
    """
    setup_logging()
    start_time = time.time()

    try:
        _run(argv)
    except ConfigError as exc:
        where = f" (key: {exc.key})" if exc.key else ""
        logger.error(f"Config error{where}: {exc.message}")
        return exc.exit_code
    except BlufsError as exc:
        context = getattr(exc, "context", None)
        suffix = f" {context}" if context else ""
        logger.error(f"{exc.category.capitalize()} error: {exc.message}{suffix}")
        return exc.exit_code
    except OSError as exc:
        logger.error(f"I/O error: {exc}")
        return EXIT_IO
    except Exception as exc:
        logger.error(f"Unhandled exception: {exc}", exc_info=True)
        return EXIT_INTERNAL

    logger.info(f"Done in {time.time() - start_time:.3f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
