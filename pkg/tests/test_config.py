import pytest
import os

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from streetforensics.core import EXPERIMENTS, Scale
from streetforensics.core.experiments import load_recipe, recipe_path
from streetforensics.core.factory import PipelineFactory
from streetforensics.core.pipeline import resolve_cache_dir
from streetforensics.errors import ConfigError
from streetforensics.infrastructure import (
    CORPUS_ROOT_ENV,
    build_config,
    corpus_root_override,
    load_config,
    nest_dotted,
    parse_key_value_text,
)
from streetforensics.models import (
    ExperimentKind,
    ModelConfig,
    Quality,
    RunConfig,
    SubDataset,
    TrainConfig,
)


class TestKeyValueParsing:

    def test_comments_and_whitespace(self):
        text = """
        # full-line comment
        seed = 4   # trailing comment
        model.width_multiplier=1/8
        """

        assert parse_key_value_text(text) == {"seed": "4", "model.width_multiplier": "1/8"}

    def test_value_may_contain_equals(self):
        assert parse_key_value_text("experiment.description = a=b") == {"experiment.description": "a=b"}

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_key_value_text("seed = 1\nseed = 2\n", source="run.cfg")

        assert excinfo.value.field == "seed"
        assert "run.cfg:2" in str(excinfo.value)

    def test_line_without_equals(self):
        with pytest.raises(ConfigError, match="run.cfg:1"):
            parse_key_value_text("just words", source="run.cfg")

    def test_empty_key(self):
        with pytest.raises(ConfigError, match="empty key"):
            parse_key_value_text(" = 3")


class TestNestDotted:

    def test_groups_sections(self):
        nested = nest_dotted({"seed": "1", "train.patience": "3", "train.max_epochs": "9"})

        assert nested == {"seed": "1", "train": {"patience": "3", "max_epochs": "9"}}

    def test_value_and_section_conflict(self):
        with pytest.raises(ConfigError):
            nest_dotted({"train": "x", "train.patience": "3"})
        with pytest.raises(ConfigError):
            nest_dotted({"train.patience": "3", "train": "x"})


class TestBuildConfig:
    """Validation errors name the offending dotted field."""

    def test_coerces_strings(self):
        config = build_config(RunConfig, nest_dotted({
            "model.width_multiplier": "1/8",
            "split.ratios": "0.5, 0.3, 0.2",
            "train.max_epochs": "7",
            "data.qualities": "RAW, LQ",
        }))

        assert config.model.width_multiplier == 0.125
        assert config.split.ratios == (0.5, 0.3, 0.2)
        assert config.train.max_epochs == 7
        assert config.data.qualities == [Quality.RAW, Quality.LQ]

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as excinfo:
            build_config(RunConfig, {"model": {"depth": "3"}})

        assert excinfo.value.field == "model.depth"
        assert str(excinfo.value) == "model.depth: unknown key"

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="optimizer: unknown key"):
            build_config(RunConfig, {"optimizer": {"lr": "1"}})

    def test_ratios_must_sum_to_one(self):
        with pytest.raises(ConfigError) as excinfo:
            build_config(RunConfig, {"split": {"ratios": "0.5, 0.3, 0.1"}})

        assert excinfo.value.field == "split.ratios"

    def test_prefix(self):
        with pytest.raises(ConfigError) as excinfo:
            build_config(TrainConfig, {"max_epochs": "0"}, prefix="train")

        assert excinfo.value.field == "train.max_epochs"

    def test_max_epochs_has_no_default(self):
        with pytest.raises(ConfigError, match="train.max_epochs"):
            build_config(RunConfig, {"train": {"patience": "3"}})

    def test_input_size_divisible_by_stride(self):
        with pytest.raises(ConfigError, match="model"):
            build_config(RunConfig, {"model": {"input_height": "100"}})

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="file not found"):
            load_config(tmp_path / "absent.cfg", RunConfig)


class TestSeeded:

    def test_routes_seed_everywhere(self):
        config = RunConfig(train=TrainConfig(max_epochs=3)).seeded(11)

        assert config.seed == 11
        assert config.split.seed == 11
        assert config.model.seed == 11
        assert config.fixture.seed == 11
        assert config.train.seed == 11

    def test_file_seed_applies_when_no_override(self):
        config = RunConfig(seed=4).seeded(None)

        assert config.split.seed == 4
        assert config.train is None

    def test_no_seed_leaves_sections(self):
        config = RunConfig(model=ModelConfig(seed=9))

        assert config.seeded(None) is config


class TestCorpusRootOverride:

    def test_unset(self, monkeypatch):
        monkeypatch.delenv(CORPUS_ROOT_ENV, raising=False)
        assert corpus_root_override() is None

    def test_blank_is_unset(self, monkeypatch):
        monkeypatch.setenv(CORPUS_ROOT_ENV, "  ")
        assert corpus_root_override() is None

    def test_set(self, monkeypatch, tmp_path):
        monkeypatch.setenv(CORPUS_ROOT_ENV, str(tmp_path))
        assert corpus_root_override() == str(tmp_path)


class TestShippedRecipes:
    """Every experiment recipe under configs/ loads at both scales."""

    @pytest.mark.parametrize("scale", list(Scale))
    @pytest.mark.parametrize("name", EXPERIMENTS)
    def test_loads(self, name, scale):
        config = load_recipe(name, scale)

        assert config.experiment.name == name
        assert config.train is not None
        assert config.split.ratios == (0.60, 0.25, 0.15)

    def test_paper_scale_uses_full_network(self):
        config = load_recipe("table3", Scale.PAPER)

        assert config.model == ModelConfig()
        assert config.train.learning_rate == 1e-4
        assert config.train.batch_size == 8
        assert config.train.patience == 10
        assert config.corpus.root is None

    def test_recipe_kinds(self):
        assert load_recipe("table2").experiment.kind is ExperimentKind.MATCHED
        assert load_recipe("table2").experiment.include_union
        assert load_recipe("table3").experiment.kind is ExperimentKind.COMPRESSION_MISMATCH
        assert load_recipe("table4").experiment.qualities == [Quality.RAW]

        unseen = load_recipe("unseen_generator").experiment
        assert unseen.real_source is SubDataset.CITYVID
        assert unseen.fake_source is SubDataset.KITTIVID
        assert unseen.heldout_fakes is SubDataset.CITYVID

    def test_recipe_paths(self):
        assert recipe_path("table4").name == "table4.cfg"
        assert recipe_path("table4", "paper").parent.name == "paper"

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            recipe_path("table9")


class TestCacheDirectory:
    """data.cache_dir is resolved against the run output directory."""

    def test_relative_lands_under_out(self, tmp_path):
        assert resolve_cache_dir("frame_cache", tmp_path / "out") == tmp_path / "out" / "frame_cache"

    def test_absolute_is_kept(self, tmp_path):
        assert resolve_cache_dir(str(tmp_path / "shared"), tmp_path / "out") == tmp_path / "shared"

    def test_unset_disables_cache(self, tmp_path):
        assert resolve_cache_dir(None, tmp_path) is None
        assert resolve_cache_dir("", tmp_path) is None

    def test_pipeline_frame_source_uses_out(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        pipeline = PipelineFactory.create_quiet_pipeline()

        source = pipeline.frame_source(ModelConfig(), "frame_cache", tmp_path / "run")

        assert source.cache.directory == tmp_path / "run" / "frame_cache"
