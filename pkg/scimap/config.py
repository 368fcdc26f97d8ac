"""scimap config — flat JSON key-value settings for the pipeline and snowball.

Example ``scimap.json``::

    {
      "thresholds": [3, 10, 10],
      "walk_length": 4,
      "damping": 0.85,
      "top_n": 10,
      "keep_fraction": 0.5,
      "filter.min_weight.keyword_citation": 0.05,
      "filter.min_node_total_degree": 1,
      "filter.keep_largest_component": true
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .analytics import DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE
from .community import DEFAULT_WALK_LENGTH
from .errors import ConfigError
from .layers import LayerTag
from .multinet import FilterSpec
from .snowball import SnowballConfig

PAGERANK_SCOPES = ("global", "module")
REDUCTION_CRITERIA = ("degree", "pagerank")


@dataclass(frozen=True)
class PipelineConfig:
    thresholds: tuple[int, ...] = (3, 10, 10)
    max_iterations: int = 5
    query: tuple[str, ...] = ()
    walk_length: int = DEFAULT_WALK_LENGTH
    damping: float = DEFAULT_DAMPING
    tolerance: float = DEFAULT_TOLERANCE
    max_iter: int = DEFAULT_MAX_ITER
    top_n: int = 10
    keep_fraction: float = 0.5
    fractional_counting: bool = False
    pagerank_scope: str = "global"
    reduce_by: str = "degree"
    filter: FilterSpec = field(default_factory=FilterSpec)

    def __post_init__(self) -> None:
        if self.walk_length < 1:
            raise ConfigError("walk_length must be >= 1")
        if not 0.0 < self.damping < 1.0:
            raise ConfigError("damping must be in (0, 1)")
        if self.top_n < 1:
            raise ConfigError("top_n must be >= 1")
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ConfigError("keep_fraction must be in (0, 1]")
        if self.pagerank_scope not in PAGERANK_SCOPES:
            raise ConfigError(f"pagerank_scope must be one of {', '.join(PAGERANK_SCOPES)}")
        if self.reduce_by not in REDUCTION_CRITERIA:
            raise ConfigError(f"reduce_by must be one of {', '.join(REDUCTION_CRITERIA)}")

    def snowball(self) -> SnowballConfig:
        """The snowball settings (``query``, ``thresholds``, ``max_iterations``)."""
        return SnowballConfig(
            seed_query=self.query,
            thresholds=self.thresholds,
            max_iterations=self.max_iterations,
        )


# key -> (field, expected type)
_SCALAR_KEYS: dict[str, tuple[str, type | tuple[type, ...]]] = {
    "max_iterations": ("max_iterations", int),
    "walk_length": ("walk_length", int),
    "damping": ("damping", (int, float)),
    "tolerance": ("tolerance", (int, float)),
    "max_iter": ("max_iter", int),
    "top_n": ("top_n", int),
    "keep_fraction": ("keep_fraction", (int, float)),
    "fractional_counting": ("fractional_counting", bool),
    "pagerank_scope": ("pagerank_scope", str),
    "reduce_by": ("reduce_by", str),
}


def _typed(key: str, value: Any, expected: type | tuple[type, ...]) -> Any:
    if isinstance(value, bool) and expected is not bool:
        raise ConfigError(f"'{key}' must not be a boolean")
    if not isinstance(value, expected):
        raise ConfigError(f"'{key}' has the wrong type: {value!r}")
    return value


def config_from_mapping(data: Mapping[str, Any]) -> PipelineConfig:
    """Build a PipelineConfig from flat keys; unknown keys raise ConfigError."""
    values: dict[str, Any] = {}
    min_weight: dict[LayerTag, float] = {}
    filter_kwargs: dict[str, Any] = {}

    for key, value in data.items():
        if key in _SCALAR_KEYS:
            name, expected = _SCALAR_KEYS[key]
            values[name] = _typed(key, value, expected)
        elif key == "thresholds":
            if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value
            ):
                raise ConfigError("'thresholds' must be a list of integers")
            values["thresholds"] = tuple(value)
        elif key == "query":
            if isinstance(value, str):
                value = [value]
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError("'query' must be a string or list of strings")
            values["query"] = tuple(value)
        elif key == "filter.min_weight":
            w = float(_typed(key, value, (int, float)))
            min_weight.update({tag: w for tag in LayerTag})
        elif key.startswith("filter.min_weight."):
            tag = key.rsplit(".", 1)[1]
            try:
                layer = LayerTag(tag)
            except ValueError as exc:
                raise ConfigError(f"unknown layer '{tag}' in '{key}'") from exc
            min_weight[layer] = float(_typed(key, value, (int, float)))
        elif key == "filter.min_node_total_degree":
            filter_kwargs["min_node_total_degree"] = _typed(key, value, int)
        elif key == "filter.keep_largest_component":
            filter_kwargs["keep_largest_component"] = _typed(key, value, bool)
        else:
            raise ConfigError(f"unknown config key '{key}'")

    values["filter"] = FilterSpec(min_weight=min_weight, **filter_kwargs)
    return PipelineConfig(**values)


def load_config(path: Path | str | None) -> PipelineConfig:
    """Read a flat JSON config; ``None`` gives the defaults."""
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return config_from_mapping(data)


def with_overrides(config: PipelineConfig, **overrides: Any) -> PipelineConfig:
    """Apply CLI flags that were actually given (None means not given)."""
    given = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **given) if given else config
