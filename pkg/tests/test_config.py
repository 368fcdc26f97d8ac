"""Tests for scimap config."""
import json
from pathlib import Path

import pytest

from scimap.config import PipelineConfig, config_from_mapping, load_config, with_overrides
from scimap.errors import ConfigError
from scimap.layers import LayerTag


def write_config(tmp_path: Path, data) -> Path:
    path = tmp_path / "scimap.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestDefaults:
    def test_none_gives_defaults(self):
        cfg = load_config(None)
        assert cfg == PipelineConfig()
        assert cfg.thresholds == (3, 10, 10)
        assert cfg.walk_length == 4
        assert cfg.damping == 0.85
        assert cfg.pagerank_scope == "global"
        assert cfg.reduce_by == "degree"
        assert cfg.filter.keep_largest_component is True

    def test_empty_mapping(self):
        assert config_from_mapping({}) == PipelineConfig()


class TestLoad:
    def test_from_file(self, tmp_path: Path):
        path = write_config(tmp_path, {
            "thresholds": [2, 5],
            "walk_length": 3,
            "damping": 0.9,
            "query": "gene flow",
            "fractional_counting": True,
            "pagerank_scope": "module",
        })
        cfg = load_config(path)
        assert cfg.thresholds == (2, 5)
        assert cfg.walk_length == 3
        assert cfg.damping == 0.9
        assert cfg.query == ("gene flow",)
        assert cfg.fractional_counting is True
        assert cfg.pagerank_scope == "module"

    def test_filter_keys(self, tmp_path: Path):
        cfg = load_config(write_config(tmp_path, {
            "filter.min_weight": 0.01,
            "filter.min_weight.keyword_citation": 0.05,
            "filter.min_node_total_degree": 2,
            "filter.keep_largest_component": False,
        }))
        assert cfg.filter.threshold(LayerTag.KEYWORD_CITATION) == 0.05
        assert cfg.filter.threshold(LayerTag.AUTHOR_CITATION) == 0.01
        assert cfg.filter.min_node_total_degree == 2
        assert cfg.filter.keep_largest_component is False

    def test_bad_json(self, tmp_path: Path):
        path = tmp_path / "scimap.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="cannot read config"):
            load_config(path)

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")

    def test_not_an_object(self, tmp_path: Path):
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(write_config(tmp_path, [1, 2, 3]))


class TestValidation:
    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config key 'walklength'"):
            config_from_mapping({"walklength": 4})

    def test_unknown_layer(self):
        with pytest.raises(ConfigError, match="unknown layer 'citations'"):
            config_from_mapping({"filter.min_weight.citations": 0.1})

    @pytest.mark.parametrize("data", [
        {"walk_length": "4"},
        {"walk_length": True},
        {"damping": "high"},
        {"thresholds": [3, "10"]},
        {"thresholds": 3},
        {"query": [1]},
        {"filter.keep_largest_component": 1},
    ])
    def test_wrong_type(self, data):
        with pytest.raises(ConfigError):
            config_from_mapping(data)

    @pytest.mark.parametrize("data", [
        {"damping": 1.0},
        {"damping": 0},
        {"walk_length": 0},
        {"top_n": 0},
        {"keep_fraction": 0.0},
        {"keep_fraction": 1.5},
        {"pagerank_scope": "local"},
        {"reduce_by": "betweenness"},
        {"filter.min_weight": 2.0},
        {"filter.min_node_total_degree": -1},
    ])
    def test_out_of_range(self, data):
        with pytest.raises(ConfigError):
            config_from_mapping(data)

    def test_config_error_is_value_error(self):
        with pytest.raises(ValueError):
            config_from_mapping({"damping": 2.0})


class TestOverrides:
    def test_none_is_ignored(self):
        cfg = PipelineConfig()
        assert with_overrides(cfg, walk_length=None, damping=None) is cfg

    def test_given_values_win(self):
        cfg = with_overrides(PipelineConfig(), walk_length=6, top_n=None, keep_fraction=0.25)
        assert cfg.walk_length == 6
        assert cfg.top_n == 10
        assert cfg.keep_fraction == 0.25

    def test_overrides_are_validated(self):
        with pytest.raises(ConfigError):
            with_overrides(PipelineConfig(), damping=1.5)


class TestSnowballSettings:
    def test_from_mapping(self):
        snow = config_from_mapping(
            {"query": "species concept", "thresholds": [2, 4], "max_iterations": 3}
        ).snowball()
        assert snow.seed_query == ("species concept",)
        assert snow.thresholds == (2, 4)
        assert snow.max_iterations == 3

    def test_defaults(self):
        snow = PipelineConfig().snowball()
        assert snow.seed_query == ()
        assert snow.thresholds == (3, 10, 10)
        assert snow.max_iterations == 5

    def test_invalid_thresholds(self):
        with pytest.raises(ConfigError):
            config_from_mapping({"thresholds": [10, 3]}).snowball()
