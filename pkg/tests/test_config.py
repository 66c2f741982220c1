"""Tests for Config and the configuration file loader."""

import json
import tempfile
from pathlib import Path

import pytest
import yaml

from sepfrag.config import BudgetParams, Config, OracleParams, OutputParams, SearchParams
from sepfrag.config_loader import (
    CONFIG_SCHEMA,
    _flatten_config,
    _organize_config_by_category,
    apply_environment,
    load_config,
    merge_config_with_cli_args,
    save_config,
    validate_config,
)
from sepfrag.transforms import BlowupBudget


class TestParams:
    """Test the parameter dataclasses."""

    def test_oracle_defaults(self):
        """Defaults match the schema."""
        params = OracleParams()
        assert params.max_size == CONFIG_SCHEMA['max_size']['default']
        assert params.budget == CONFIG_SCHEMA['budget']['default']
        assert params.samples == CONFIG_SCHEMA['samples']['default']
        assert params.seed == 0

    def test_budget_builds_blowup_budget(self):
        """BudgetParams hands its limits to BlowupBudget."""
        budget = BudgetParams(max_formula_len=100, max_terms=8).blowup()
        assert isinstance(budget, BlowupBudget)
        assert budget.max_formula_len == 100
        assert budget.max_terms == 8

    def test_search_defaults(self):
        """Search defaults."""
        params = SearchParams()
        assert params.max_model_size == 4
        assert params.allow_constants is True
        assert params.fok_levels == (1, 2, 3)

    def test_output_defaults(self):
        """CSV without trace."""
        assert OutputParams().format == 'csv'
        assert OutputParams().trace is False


class TestConfig:
    """Test the Config dataclass."""

    def test_rejects_non_positive(self):
        """Sizes and counts must be positive."""
        with pytest.raises(ValueError, match="max_size"):
            Config(oracle=OracleParams(max_size=0))
        with pytest.raises(ValueError, match="max_model_size"):
            Config(search=SearchParams(max_model_size=0))

    def test_rejects_negative_seed(self):
        """Seeds are non-negative."""
        with pytest.raises(ValueError, match="seed"):
            Config(oracle=OracleParams(seed=-1))

    def test_from_cli_args(self):
        """Flat arguments land in their categories."""
        config = Config.from_cli_args(max_size=2, seed=7, max_terms=16, fok_levels=[2],
                                      format='json', trace=True)
        assert config.oracle.max_size == 2
        assert config.oracle.seed == 7
        assert config.budget.max_terms == 16
        assert config.search.fok_levels == (2,)
        assert config.output.format == 'json'
        assert config.output.trace is True

    def test_to_dict_is_json_ready(self):
        """Paths become strings and tuples lists."""
        config = Config(config_file=Path('run.yaml'))
        data = config.to_dict()
        assert data['config_file'] == 'run.yaml'
        assert data['search']['fok_levels'] == [1, 2, 3]
        json.dumps(data)


class TestLoadConfig:
    """Test load_config."""

    def test_nested_yaml_is_flattened(self):
        """Categories disappear on load."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            path.write_text(yaml.dump({'oracle': {'seed': 4}, 'budget': {'max_terms': 9}}))
            assert load_config(path) == {'seed': 4, 'max_terms': 9}

    def test_flat_json(self):
        """Flat files load as they are."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.json"
            path.write_text(json.dumps({'max_size': 2}))
            assert load_config(path) == {'max_size': 2}

    def test_missing_file(self):
        """A missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_config(Path("/nonexistent/config.yaml"))

    def test_unsupported_extension(self):
        """Only .json, .yaml and .yml load."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.toml"
            path.write_text("seed = 1\n")
            with pytest.raises(ValueError, match="Unsupported config format"):
                load_config(path)

    def test_root_must_be_mapping(self):
        """A list at the root is refused."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            path.write_text("- 1\n- 2\n")
            with pytest.raises(ValueError, match="dictionary"):
                load_config(path)


class TestMerging:
    """Test precedence between file, environment and command line."""

    def test_cli_overrides_file(self):
        """Given CLI values win, None does not."""
        merged = merge_config_with_cli_args({'seed': 1, 'max_size': 2},
                                            {'seed': 5, 'max_size': None})
        assert merged == {'seed': 5, 'max_size': 2}

    def test_environment_overrides_file(self):
        """SEPFRAG_SEED replaces the file's seed."""
        assert apply_environment({'seed': 1}, {'SEPFRAG_SEED': '8'}) == {'seed': 8}
        assert apply_environment({'seed': 1}, {}) == {'seed': 1}

    def test_environment_must_be_integer(self):
        """A non-integer SEPFRAG_SEED is refused."""
        with pytest.raises(ValueError, match="SEPFRAG_SEED"):
            apply_environment({}, {'SEPFRAG_SEED': 'abc'})

    @pytest.mark.parametrize("settings", [
        {'max_size': 0},
        {'max_terms': -3},
        {'seed': -1},
        {'format': 'xml'},
        {'fok_levels': []},
        {'fok_levels': [0, 2]},
    ])
    def test_validate_rejects(self, settings):
        """Invalid values raise ValueError."""
        with pytest.raises(ValueError):
            validate_config(settings)

    def test_validate_accepts(self):
        """Valid settings pass."""
        validate_config({'max_size': 2, 'seed': 0, 'format': 'text', 'fok_levels': [2, 3]})


class TestSaveConfig:
    """Test save_config."""

    def test_yaml_round_trip(self):
        """A saved YAML loads back to its non-default settings."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            save_config(path, {'max_size': 2, 'seed': 0, 'format': 'text'})
            assert load_config(path) == {'max_size': 2, 'format': 'text'}

    def test_yaml_has_comments(self):
        """Comments name the file and describe each setting."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.yaml"
            save_config(path, {'max_terms': 64})
            content = path.read_text()
            assert content.startswith("# sepfrag Configuration")
            assert "# Generated:" in content
            assert CONFIG_SCHEMA['max_terms']['description'] in content

    def test_include_defaults(self):
        """Defaults are only written when asked for."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "config.json"
            save_config(path, {'seed': 0, 'fok_levels': (1, 2, 3)}, include_defaults=True)
            data = json.loads(path.read_text())
            assert data == {'oracle': {'seed': 0}, 'search': {'fok_levels': [1, 2, 3]}}

    def test_unsupported_extension(self):
        """Only YAML and JSON are written."""
        with tempfile.TemporaryDirectory() as tmpdir:
            with pytest.raises(ValueError, match="Unsupported config format"):
                save_config(Path(tmpdir) / "config.txt", {'seed': 1})

    def test_organize_and_flatten(self):
        """Organizing by category and flattening are inverses."""
        flat = {'max_size': 2, 'max_terms': 9, 'trace': True}
        organized = _organize_config_by_category(flat)
        assert organized == {'oracle': {'max_size': 2}, 'budget': {'max_terms': 9},
                             'output': {'trace': True}}
        assert _flatten_config(organized) == flat
