"""Configuration file loader and saver for sepfrag."""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from .config import SEED_ENV

CATEGORIES = ('oracle', 'budget', 'search', 'output')

# All configurable parameters with their defaults and descriptions
CONFIG_SCHEMA: Dict[str, Dict[str, Any]] = {
    # Equivalence oracle
    'max_size': {
        'default': 3,
        'type': int,
        'description': 'Largest domain size the equivalence oracle checks',
        'category': 'oracle'
    },
    'budget': {
        'default': 10 ** 6,
        'type': int,
        'description': 'Structures enumerated before switching to sampling',
        'category': 'oracle'
    },
    'samples': {
        'default': 10 ** 4,
        'type': int,
        'description': 'Random structures drawn per size once the budget is spent',
        'category': 'oracle'
    },
    'seed': {
        'default': 0,
        'type': int,
        'description': 'Seed for sampling and corpus generation',
        'category': 'oracle'
    },
    # Translation limits
    'max_formula_len': {
        'default': 10 ** 6,
        'type': int,
        'description': 'Largest formula a translation may build, in symbols',
        'category': 'budget'
    },
    'max_atoms_for_expansion': {
        'default': 12,
        'type': int,
        'description': 'Largest atom set a type expansion may range over',
        'category': 'budget'
    },
    'max_terms': {
        'default': 4096,
        'type': int,
        'description': 'Largest DNF/CNF a single regrouping may build',
        'category': 'budget'
    },
    'exhaustive_limit': {
        'default': 12,
        'type': int,
        'description': 'Variable count up to which partitions are searched exhaustively',
        'category': 'budget'
    },
    # Model search
    'max_model_size': {
        'default': 4,
        'type': int,
        'description': 'Domain bound for bounded model search',
        'category': 'search'
    },
    'allow_constants': {
        'default': True,
        'type': bool,
        'description': 'Accept constants in SAF and SGKS sentences',
        'category': 'search'
    },
    'fok_levels': {
        'default': [1, 2, 3],
        'type': list,
        'description': 'Variable counts tried when classifying into SFO^k',
        'category': 'search'
    },
    # Output
    'format': {
        'default': 'csv',
        'type': str,
        'description': 'Gap table format for bench: csv, text or json',
        'category': 'output'
    },
    'trace': {
        'default': False,
        'type': bool,
        'description': 'Print every translation step',
        'category': 'output'
    },
}

_POSITIVE = ('max_size', 'budget', 'samples', 'max_formula_len', 'max_atoms_for_expansion',
             'max_terms', 'exhaustive_limit', 'max_model_size')


def load_config(config_path: Path) -> Dict[str, Any]:
    """Load configuration from JSON or YAML file.

    Supports both flat and nested (categorized) config formats.
    Nested configs are flattened for use with the CLI.

    Args:
        config_path: Path to configuration file (.json or .yaml/.yml)

    Returns:
        Dictionary of configuration parameters (flattened)

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If file format is not supported or invalid
    """
    config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    suffix = config_path.suffix.lower()

    if suffix == '.json':
        with open(config_path, 'r') as f:
            config = json.load(f)
    elif suffix in ('.yaml', '.yml'):
        with open(config_path, 'r') as f:
            config = yaml.safe_load(f)
    else:
        raise ValueError(
            f"Unsupported config format: {suffix}. Use .json, .yaml, or .yml"
        )

    if not isinstance(config, dict):
        raise ValueError("Config file must contain a dictionary/object at root level")

    return _flatten_config(config)


def merge_config_with_cli_args(config: Dict[str, Any], cli_args: Dict[str, Any]) -> Dict[str, Any]:
    """Merge configuration file with CLI arguments.

    CLI arguments take precedence over config file values; None means
    "not given on the command line".
    """
    merged = config.copy()
    for key, value in cli_args.items():
        if value is not None:
            merged[key] = value
    return merged


def apply_environment(
    config: Dict[str, Any], environ: Optional[Mapping[str, str]] = None
) -> Dict[str, Any]:
    """Let SEPFRAG_SEED override the seed from the config file.

    Applied before the CLI arguments are merged, so --seed still wins.
    """
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV):
        try:
            seed = int(environ[SEED_ENV])
        except ValueError:
            raise ValueError(f"{SEED_ENV} must be an integer, got {environ[SEED_ENV]!r}")
        config = {**config, 'seed': seed}
    return config


def validate_config(config: Dict[str, Any]) -> None:
    """Validate configuration parameters.

    Raises:
        ValueError: If configuration has invalid values
    """
    for key in _POSITIVE:
        if key in config and config[key] is not None:
            if not isinstance(config[key], int) or config[key] < 1:
                raise ValueError(f"{key} must be a positive integer")

    if config.get('seed') is not None and config['seed'] < 0:
        raise ValueError("seed must be non-negative")

    if 'format' in config and config['format'] is not None:
        valid_formats = ['csv', 'text', 'json']
        if config['format'] not in valid_formats:
            raise ValueError(
                f"Invalid format: {config['format']}. "
                f"Must be one of: {', '.join(valid_formats)}"
            )

    if config.get('fok_levels') is not None:
        levels = config['fok_levels']
        if not levels or any(not isinstance(k, int) or k < 1 for k in levels):
            raise ValueError("fok_levels must be a non-empty list of positive integers")


def save_config(
    filepath: Path,
    settings: Dict[str, Any],
    include_defaults: bool = False,
    add_comments: bool = True
) -> None:
    """Save configuration settings to a YAML or JSON file.

    Args:
        filepath: Path to save configuration to (.yaml, .yml, or .json)
        settings: Flat dictionary of settings to save
        include_defaults: If True, include settings that match defaults
        add_comments: If True, add descriptive comments (YAML only)

    Raises:
        ValueError: If file format is not supported
    """
    filepath = Path(filepath)
    suffix = filepath.suffix.lower()

    if suffix not in ('.yaml', '.yml', '.json'):
        raise ValueError(
            f"Unsupported config format: {suffix}. Use .yaml, .yml, or .json"
        )

    config_to_save: Dict[str, Any] = {}
    for key, value in settings.items():
        if isinstance(value, tuple):
            value = list(value)
        if key not in CONFIG_SCHEMA:
            config_to_save[key] = value
            continue
        if (include_defaults or value != CONFIG_SCHEMA[key]['default']) and value is not None:
            config_to_save[key] = value

    organized = _organize_config_by_category(config_to_save)

    if suffix == '.json':
        with open(filepath, 'w') as f:
            json.dump(organized, f, indent=2, default=str)
    elif add_comments:
        with open(filepath, 'w') as f:
            f.write(_generate_yaml_with_comments(organized))
    else:
        with open(filepath, 'w') as f:
            yaml.dump(organized, f, default_flow_style=False, sort_keys=False)


def _organize_config_by_category(config: Dict[str, Any]) -> Dict[str, Any]:
    """Organize flat config into nested structure by category."""
    organized: Dict[str, Any] = {category: {} for category in CATEGORIES}

    for key, value in config.items():
        if key in CONFIG_SCHEMA:
            organized[CONFIG_SCHEMA[key]['category']][key] = value
        else:
            organized[key] = value

    return {k: v for k, v in organized.items() if v}


def _flatten_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Flatten nested config back to flat structure."""
    flat: Dict[str, Any] = {}
    for key, value in config.items():
        if isinstance(value, dict) and key in CATEGORIES:
            flat.update(value)
        else:
            flat[key] = value
    return flat


def _yaml_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, str):
        return f"\"{value}\""
    if value is None:
        return "null"
    if isinstance(value, list):
        return "[" + ", ".join(_yaml_value(v) for v in value) + "]"
    return str(value)


def _generate_yaml_with_comments(config: Dict[str, Any]) -> str:
    """Generate YAML content with descriptive comments."""
    lines = [
        "# sepfrag Configuration",
        f"# Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        "#",
        "# Load with: sepfrag --config this_file.yaml equiv a.fol b.fol",
        "",
    ]

    category_descriptions = {
        'oracle': 'Equivalence Oracle Settings',
        'budget': 'Translation Budget Settings',
        'search': 'Model Search Settings',
        'output': 'Output Settings',
    }

    for category, settings in config.items():
        if category in category_descriptions:
            lines.append(f"# {category_descriptions[category]}")
            lines.append(f"{category}:")
            for key, value in settings.items():
                if key in CONFIG_SCHEMA:
                    lines.append(f"  # {CONFIG_SCHEMA[key]['description']}")
                lines.append(f"  {key}: {_yaml_value(value)}")
            lines.append("")
        elif isinstance(settings, dict):
            lines.append(f"{category}:")
            for k, v in settings.items():
                lines.append(f"  {k}: {_yaml_value(v)}")
        else:
            lines.append(f"{category}: {_yaml_value(settings)}")

    return "\n".join(lines)
