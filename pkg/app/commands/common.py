"""Shared command helpers: config parsing, dataset preparation, rankers, metadata."""

import hashlib
import json
import logging
from functools import partial
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app import __version__
from app.core.exceptions import ConfigError, DataIOError
from app.models.dataset import Dataset
from app.models.graph import NormalizedAffinity, SimilarityGraph
from app.models.ranking import FeatureRanking
from app.schemas.common import METADATA_KIND, RunMetadata
from app.schemas.data import SyntheticSpec
from app.schemas.run import MethodEnum, RunConfig
from app.schemas.solver import BlufsConfig
from app.services.dataset_ops import gen_synthetic, load_dataset, standardize
from app.services.eval_ops import Ranker
from app.services.graph_ops import build_similarity, normalize_affinity
from app.services.selection_ops import baseline_ranking, feature_ranking, lapscore
from app.services.solver_ops import run_pam

logger = logging.getLogger(__name__)

METADATA_FILE = "metadata.json"

# Теги вариантов union в loc ошибок pydantic (dataset: str | SyntheticSpec)
_UNION_TAGS = {"str", "SyntheticSpec"}


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


def _error_key(loc: tuple) -> str | None:
    parts = [part for part in loc if isinstance(part, str) and part not in _UNION_TAGS]
    return parts[-1] if parts else None


def _override_seed(document: dict[str, Any], seed: int):
    """
    Подставить seed решателя в сырой документ.

    Seeds протокола, выведенные из старого seed (так их пишет metadata.json),
    удаляются и выводятся заново; явно заданный список остается как есть.
    """
    blufs = dict(document.get("blufs") or {})
    old_seed = document.pop("seed", blufs.get("seed", BlufsConfig.model_fields["seed"].default))
    blufs["seed"] = seed
    document["blufs"] = blufs

    evaluation = document.get("eval")
    if not isinstance(evaluation, dict) or not isinstance(old_seed, int):
        return
    seeds = evaluation.get("seeds")
    if isinstance(seeds, list) and seeds == list(range(old_seed, old_seed + len(seeds))):
        document["eval"] = {key: value for key, value in evaluation.items() if key != "seeds"}
        logger.debug(f"Protocol seeds re-derived from overridden seed {seed}")


def parse_config(
    path: str | Path, seed: int | None = None, standardize: bool | None = None
) -> RunConfig:
    """
    Прочитать и провалидировать JSON-конфигурацию запуска.

    Принимает также metadata.json предыдущего запуска (берется resolved_config).

    Args:
        path: Путь к JSON-файлу
        seed: Переопределение blufs.seed (флаг --seed)
        standardize: Переопределение standardize (флаг --no-standardize)

    Returns:
        RunConfig: Полностью разрешенная конфигурация

    Raises:
        DataIOError: Файл не найден или не читается
        ConfigError: Некорректный JSON, лишний/отсутствующий ключ, тип или диапазон
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataIOError(f"Config file not found: {path}")
    except (OSError, UnicodeDecodeError) as e:
        raise DataIOError(f"Cannot read config {path}: {e}")

    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config {path} is not valid JSON: {e}")
    if not isinstance(document, dict):
        raise ConfigError(f"Config {path} must be a JSON object")

    if document.get("kind") == METADATA_KIND:
        logger.info(f"Re-running from metadata {path}")
        document = document.get("resolved_config")
        if not isinstance(document, dict):
            raise ConfigError("Metadata has no resolved_config", key="resolved_config")

    document = dict(document)
    if seed is not None:
        _override_seed(document, seed)
    if standardize is not None:
        document["standardize"] = standardize

    try:
        cfg = RunConfig.model_validate(document)
    except ValidationError as e:
        error = e.errors()[0]
        key = _error_key(tuple(error["loc"]))
        where = ".".join(str(part) for part in error["loc"]) or "<root>"
        raise ConfigError(f"Invalid config value at {where}: {error['msg']}", key=key)

    logger.debug(f"Config parsed: {cfg.model_dump(mode='json', by_alias=True)}")
    return cfg


def resolved_config(cfg: RunConfig) -> dict[str, Any]:
    """Разрешенная конфигурация как JSON-совместимый словарь."""
    return cfg.model_dump(mode="json", by_alias=True)


def config_hash(cfg: RunConfig) -> str:
    """sha256 канонического JSON разрешенной конфигурации."""
    canonical = json.dumps(resolved_config(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Dataset and solver resolution
# ---------------------------------------------------------------------------


def prepare_dataset(cfg: RunConfig) -> Dataset:
    """
    Загрузить или сгенерировать датасет и при необходимости стандартизовать.

    Raises:
        DataIOError: Файл датасета не найден или некорректен
    """
    if isinstance(cfg.dataset, SyntheticSpec):
        ds = gen_synthetic(cfg.dataset)
    else:
        ds = load_dataset(cfg.dataset)
    if cfg.dataset_name:
        ds = ds.model_copy(update={"name": cfg.dataset_name})
    if cfg.standardize:
        ds = standardize(ds)
    return ds


def solver_config(cfg: RunConfig, ds: Dataset) -> BlufsConfig:
    """
    Конфигурация решателя с разрешенным числом кластеров.

    Raises:
        ConfigError: n_clusters не задан, а у датасета нет меток
    """
    blufs = cfg.blufs
    if blufs.n_clusters is None:
        if ds.class_count is None:
            raise ConfigError(
                "n_clusters is required for an unlabeled dataset", key="n_clusters"
            )
        blufs = blufs.model_copy(update={"n_clusters": ds.class_count})
    return blufs


def affinity_for(ds: Dataset, blufs: BlufsConfig) -> tuple[SimilarityGraph, NormalizedAffinity]:
    """k-NN граф датасета и его нормировка."""
    graph = build_similarity(ds.features, k=blufs.k, sigma=blufs.sigma)
    return graph, normalize_affinity(graph)


def rank_blufs(
    blufs: BlufsConfig, s_hat: NormalizedAffinity, ds: Dataset, m: int
) -> FeatureRanking:
    """Ранжирование BLUFS с бюджетом s = m."""
    state = run_pam(ds.features, s_hat, blufs.model_copy(update={"s": m}))
    return feature_ranking(state.W)


def rank_lapscore(graph: SimilarityGraph, ds: Dataset, m: int) -> FeatureRanking:
    """Ранжирование Laplacian Score с m выбранными признаками."""
    return lapscore(ds.features, graph, m)


def rank_baseline(ds: Dataset, m: int) -> FeatureRanking:
    """Все признаки без отбора."""
    return baseline_ranking(ds.d)


def make_ranker(cfg: RunConfig, ds: Dataset, blufs: BlufsConfig) -> tuple[Ranker, list[int]]:
    """
    Функция ранжирования для выбранного метода и список чисел признаков.

    Для baseline число признаков одно: d.
    """
    if cfg.method == MethodEnum.BASELINE:
        return rank_baseline, [ds.d]
    graph, s_hat = affinity_for(ds, blufs)
    if cfg.method == MethodEnum.LAPSCORE:
        return partial(rank_lapscore, graph), list(cfg.eval.feature_counts)
    return partial(rank_blufs, blufs, s_hat), list(cfg.eval.feature_counts)


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


def build_metadata(cfg: RunConfig, command: str, artifacts: list[str]) -> RunMetadata:
    """Метаданные запуска (без времени выполнения: повтор дает те же байты)."""
    return RunMetadata(
        command=command,
        version=__version__,
        config_hash=config_hash(cfg),
        dataset_name=cfg.resolved_dataset_name,
        resolved_config=resolved_config(cfg),
        artifacts=sorted(artifacts),
    )


def write_json(document: dict[str, Any], path: str | Path) -> Path:
    """Записать JSON-документ (отступ 2, завершающий перевод строки)."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    except OSError as e:
        raise DataIOError(f"Cannot write {path}: {e}")
    return path


def write_metadata(
    cfg: RunConfig, command: str, artifacts: list[Path], out: Path
) -> Path:
    """Записать metadata.json рядом с артефактами."""
    names = [Path(p).name for p in artifacts]
    metadata = build_metadata(cfg, command, names)
    path = write_json(metadata.model_dump(mode="json"), Path(out) / METADATA_FILE)
    logger.info(f"Metadata written to {path}")
    return path
