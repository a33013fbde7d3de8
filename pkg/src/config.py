"""
Configuration settings
"""

import os
from typing import Any, Optional

import yaml
from dotenv import load_dotenv

from models import AggrelabError

load_dotenv()


class ConfigError(AggrelabError):
    """Raised when a settings file cannot be applied."""
    pass


LOG_LEVEL = os.getenv("AGGRELAB_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# === 2-DLA Realization ===
PAD_MARGIN = int(os.getenv("AGGRELAB_PAD_MARGIN", "3"))
BRUTE_FORCE_LIMIT = int(os.getenv("AGGRELAB_BRUTE_FORCE_LIMIT", "8"))

# === Oracle Harness ===
ORACLE_JOBS = int(os.getenv("AGGRELAB_ORACLE_JOBS", "1"))
ORACLE_SEED = int(os.getenv("AGGRELAB_ORACLE_SEED", "2024"))

# === Circuit Layout ===
LANE_SPACING = int(os.getenv("AGGRELAB_LANE_SPACING", "6"))
MAX_LATTICE_SIZE = int(os.getenv("AGGRELAB_MAX_LATTICE_SIZE", "4000"))

_OVERRIDABLE = {
    "log_level": "LOG_LEVEL",
    "pad_margin": "PAD_MARGIN",
    "brute_force_limit": "BRUTE_FORCE_LIMIT",
    "oracle_jobs": "ORACLE_JOBS",
    "oracle_seed": "ORACLE_SEED",
    "lane_spacing": "LANE_SPACING",
    "max_lattice_size": "MAX_LATTICE_SIZE",
}


def load_settings(path: str) -> dict[str, Any]:
    """
    Apply a YAML settings file on top of the environment defaults.

    Args:
        path: YAML file holding a flat mapping, e.g. ``oracle_jobs: 4``

    Returns:
        The mapping that was applied

    Raises:
        ConfigError: If the file is not a mapping or names an unknown key
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot read settings {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Settings {path} must be a mapping")

    for key, value in data.items():
        if key not in _OVERRIDABLE:
            raise ConfigError(f"Unknown setting '{key}' in {path}")
        name = _OVERRIDABLE[key]
        current = globals()[name]
        globals()[name] = type(current)(value)
    return data


def get_lattice_size(
    layers: int,
    inputs: int,
    needed_width: int = 0,
    needed_height: int = 0,
) -> int:
    """
    Side length of the square lattice hosting a compiled circuit.

    Logic:
    - At least 10 rows per layer and 5 columns per input
    - Never smaller than what the lane layout actually uses
    - A few spare rows on top so throws start above all activity

    Args:
        layers: Number of circuit layers
        inputs: Number of input gates
        needed_width: Rightmost column used by the layout
        needed_height: Highest height targeted by the layout

    Returns:
        Lattice side N
    """
    return max(10 * layers, 5 * inputs, needed_width + 1, needed_height + 3)


def get_move_budget(n_size: int, k: int = 1, override: Optional[int] = None) -> int:
    """
    Trajectory length used for random growth runs.

    Straight-down walks need N moves; walks with lateral freedom wander,
    so they get a budget proportional to the lattice area.
    """
    if override is not None:
        return override
    if k == 1:
        return n_size
    return 4 * n_size * n_size
