"""Common schemas."""

from typing import Any

from pydantic import BaseModel, Field

METADATA_KIND = "blufs-metadata"


class RunMetadata(BaseModel):
    """Метаданные артефактов запуска (достаточны для побитового повтора)."""

    kind: str = METADATA_KIND
    command: str
    version: str
    config_hash: str
    dataset_name: str
    resolved_config: dict[str, Any]
    artifacts: list[str] = Field(default_factory=list)
