"""Pipeline configuration: defaults, TOML config file and flag overrides."""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .const import (
    CONFIG_VERSION,
    DEFAULT_MIN_GLOBAL_PROBABILITY,
    DEFAULT_MIN_SHARED_SUBSTRING,
    DEFAULT_MIN_UNIQUE_WORDS,
    LOGGER,
    PAGERANK_DAMPING,
    PAGERANK_MAX_ITER,
    PAGERANK_TOLERANCE,
    STAGES,
    TOP_CENTRAL_NODES,
)
from .corpus_io import QuotegraphError, load_word_list
from .preprocess import PreprocessConfig

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping


class ConfigError(QuotegraphError):
    """Exception to indicate an invalid configuration."""

    def __init__(self, message: str, stage: str | None = None) -> None:
        """Initialize configuration error."""
        super().__init__(message)
        self.stage = stage


class InputPaths(BaseModel):
    """Input files of the pipeline."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    articles: Path | None = None
    alias_table: Path | None = None
    snapshot: Path | None = None
    hierarchy: Path | None = None
    defunct: Path | None = None
    stopwords: Path | None = None


# Input -> (stages reading it, required by those stages)
INPUT_STAGES: dict[str, tuple[tuple[str, ...], bool]] = {
    "articles": (("ingest",), True),
    "stopwords": (("preprocess", "cluster"), False),
    "alias_table": (("link", "graph"), True),
    "snapshot": (("enrich",), True),
    "hierarchy": (("enrich",), False),
    "defunct": (("enrich",), False),
}


class PipelineConfig(BaseModel):
    """Every setting of a pipeline run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    config_version: int = CONFIG_VERSION
    min_unique_words: int = Field(DEFAULT_MIN_UNIQUE_WORDS, ge=1)
    min_shared_substring: int = Field(DEFAULT_MIN_SHARED_SUBSTRING, ge=2)
    min_global_probability: float = Field(DEFAULT_MIN_GLOBAL_PROBABILITY, ge=0.0)
    damping: float = Field(PAGERANK_DAMPING, gt=0.0, lt=1.0)
    tolerance: float = Field(PAGERANK_TOLERANCE, gt=0.0)
    max_iter: int = Field(PAGERANK_MAX_ITER, ge=1)
    top_k: int = Field(TOP_CENTRAL_NODES, ge=1)
    inputs: InputPaths = InputPaths()
    out: Path = Path("out")
    threads: int = Field(1, ge=1)
    chunk_size: int = Field(512, ge=1)
    seed: int = 0

    def preprocess_config(self) -> PreprocessConfig:
        """Return the preprocessing thresholds, with a custom stopword list if set."""
        values: dict[str, Any] = {
            "min_unique_words": self.min_unique_words,
            "min_shared_substring": self.min_shared_substring,
        }
        if self.inputs.stopwords is not None:
            values["stopwords"] = load_word_list(self.inputs.stopwords)
        return PreprocessConfig(**values)


def read_config_file(path: Path) -> dict[str, Any]:
    """
    Read a TOML configuration file.

    Raises:
        ConfigError: If the file is unreadable, malformed or of another
            configuration version.

    """
    try:
        with path.open("rb") as f:
            values = tomllib.load(f)
    except OSError as err:
        msg = f"cannot read config file {path}: {err.strerror}"
        raise ConfigError(msg) from err
    except tomllib.TOMLDecodeError as err:
        msg = f"malformed config file {path}: {err}"
        raise ConfigError(msg) from err

    version = values.get("config_version")
    if version != CONFIG_VERSION:
        msg = (
            f"unsupported config_version {version!r} in {path}, "
            f"expected {CONFIG_VERSION}"
        )
        raise ConfigError(msg)

    # Relative input paths are resolved against the config file's directory
    base = path.parent
    inputs = values.get("inputs", {})
    if isinstance(inputs, dict):
        values["inputs"] = {
            key: str(base / value) if isinstance(value, str) else value
            for key, value in inputs.items()
        }
    return values


def build_config(
    file_values: Mapping[str, Any] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """
    Merge defaults, config file values and flag overrides.

    Overrides set to None are ignored; ``inputs`` overrides are merged key by
    key.

    Raises:
        ConfigError: If the merged values are invalid.

    """
    values = dict(file_values or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "inputs":
            merged = dict(values.get("inputs", {}))
            merged.update({k: v for k, v in value.items() if v is not None})
            values["inputs"] = merged
        else:
            values[key] = value
    try:
        return PipelineConfig.model_validate(values)
    except ValidationError as err:
        details = "; ".join(
            f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in err.errors()
        )
        msg = f"invalid configuration: {details}"
        raise ConfigError(msg) from err


def validate_paths(config: PipelineConfig, stages: Iterable[str] = STAGES) -> None:
    """
    Check the inputs of the given stages before any of them runs.

    Raises:
        ConfigError: Naming the stage whose input is missing or unreadable.

    """
    wanted = set(stages)
    for name, (readers, required) in INPUT_STAGES.items():
        stage = next((s for s in readers if s in wanted), None)
        if stage is None:
            continue
        path: Path | None = getattr(config.inputs, name)
        if path is None:
            if required:
                msg = f"no {name.replace('_', ' ')} path configured"
                raise ConfigError(msg, stage)
            continue
        if not path.is_file():
            msg = f"{name.replace('_', ' ')} {path} does not exist"
            raise ConfigError(msg, stage)
    LOGGER.debug("Validated input paths for stages %s", sorted(wanted))
