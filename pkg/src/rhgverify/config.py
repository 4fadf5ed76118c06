"""Configuration management for rhgverify."""

import logging
import os
from typing import Any, Dict, Optional

import toml
from platformdirs import user_config_dir
from pydantic import ValidationError

from .errors import InputError
from .models import BudgetSet, CostParams, SearchBounds

logger = logging.getLogger(__name__)

APP_NAME = "rhgverify"
CONFIG_FILE_NAME = "config.toml"
THREADS_ENV = "RHG_THREADS"

DEFAULT_CONFIG = {
    "cost": {
        "kappa": 0.93,
        "ops_per_cell": 24.0,
        "eps0_A": 0.0134,
        # empty means the same as eps0_A
        "eps0_Y": "",
        "injection_volume": 1.0,
        "plain_t_coefficient": 36.0,
        "a_error_length": "L_Y",
    },
    "search": {
        "lambda_max": 60,
        "d_max": 15,
        "l_cap": 3,
    },
    "output": {
        "format": "text",
    },
    "budgets": {},
}


def get_config_path():
    """Get the path to the configuration file."""
    return os.path.join(user_config_dir(APP_NAME), CONFIG_FILE_NAME)


def _merge_defaults(config: Dict[str, Any]) -> Dict[str, Any]:
    for section, values in DEFAULT_CONFIG.items():
        if section not in config:
            config[section] = dict(values)
        else:
            for key, value in values.items():
                if key not in config[section]:
                    config[section][key] = value
    return config


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration from file or create the default one.

    An explicit ``path`` must exist; the user-level file is created with the
    defaults on first use.
    """
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return _merge_defaults(toml.load(f))
        except toml.TomlDecodeError as e:
            raise InputError(f"cannot parse config {path}: {e}") from e
        except IOError as e:
            raise InputError(f"cannot read config {path}: {e}") from e

    config_path = get_config_path()
    if os.path.exists(config_path):
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                return _merge_defaults(toml.load(f))
        except (toml.TomlDecodeError, IOError):
            # If config is corrupted, use defaults
            logger.warning("Ignoring unreadable config file %s", config_path)
            return _merge_defaults({})

    try:
        os.makedirs(os.path.dirname(config_path), exist_ok=True)
        with open(config_path, "w", encoding="utf-8") as f:
            toml.dump(DEFAULT_CONFIG, f)
    except IOError:
        logger.debug("Could not write default config to %s", config_path)
    return _merge_defaults({})


def worker_count(requested: Optional[int] = None) -> int:
    """Threads to use: ``requested``, else ``RHG_THREADS``, else every CPU."""
    if requested is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        try:
            requested = int(raw) if raw else 0
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if requested < 0:
        raise InputError(f"worker count must be nonnegative, got {requested}")
    return requested or os.cpu_count() or 1


def _model(cls, section: str, values: Dict[str, Any]):
    try:
        return cls(**values)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        raise InputError(f"config [{section}] {where}: {error['msg']}") from e


def cost_params_from_config(config: Dict[str, Any]) -> CostParams:
    return _model(CostParams, "cost", config["cost"])


def search_bounds_from_config(config: Dict[str, Any]) -> SearchBounds:
    return _model(SearchBounds, "search", config["search"])


def budgets_from_config(config: Dict[str, Any], label: str = "compact") -> BudgetSet:
    """Built-in budget set ``label`` with the ``[budgets.<gate>]`` overrides applied."""
    budgets = BudgetSet.builtin(label)
    overrides = config.get("budgets") or {}
    if not isinstance(overrides, dict) or not all(isinstance(v, dict) for v in overrides.values()):
        raise InputError("config [budgets] must hold one table per gate")
    return budgets.with_overrides(overrides) if overrides else budgets


def load_budget_file(path: str, base: str = "compact") -> BudgetSet:
    """A budget set from a TOML file of ``[budgets.<gate>]`` tables over ``base``."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = toml.load(f)
    except toml.TomlDecodeError as e:
        raise InputError(f"cannot parse budget file {path}: {e}") from e
    except IOError as e:
        raise InputError(f"cannot read budget file {path}: {e}") from e
    overrides = data.get("budgets")
    if not isinstance(overrides, dict) or not overrides:
        raise InputError(f"budget file {path} has no [budgets.<gate>] tables")
    label = os.path.splitext(os.path.basename(path))[0]
    return budgets_from_config({"budgets": overrides}, base).model_copy(update={"label": label})
