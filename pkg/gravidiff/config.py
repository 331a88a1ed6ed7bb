"""Configuration module for gravidiff."""

import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from .models import G_DEFAULT, UnitsMode

logger = logging.getLogger(__name__)

THREADS_ENV = "GRAVIDIFF_THREADS"

FOCUS_CONSTANT_SOURCES = ("computed", "paper")
KAPPA_STRATEGIES = ("consistent", "paper-literal")
ENERGY_SOURCES = ("printed", "thermal")


@dataclass(frozen=True)
class Config:
    """Configuration for gravidiff runs."""

    # Logging
    log_level: str = "WARNING"

    # Units and field
    units: str = UnitsMode.MODEL.value
    g: float = G_DEFAULT

    # Parallel grid evaluation
    threads: int = 1

    # Numerical variants
    focus_constant_source: str = "computed"
    kappa_strategy: str = "consistent"
    energy_source: str = "printed"

    @property
    def units_mode(self) -> UnitsMode:
        return UnitsMode(self.units)

    def validate(self) -> None:
        """
        Check enumerated options and numeric ranges.

        Raises:
            ValueError: If any option is outside its allowed set
        """
        UnitsMode(self.units)
        if self.focus_constant_source not in FOCUS_CONSTANT_SOURCES:
            raise ValueError(f"focus_constant_source must be one of {FOCUS_CONSTANT_SOURCES}")
        if self.kappa_strategy not in KAPPA_STRATEGIES:
            raise ValueError(f"kappa_strategy must be one of {KAPPA_STRATEGIES}")
        if self.energy_source not in ENERGY_SOURCES:
            raise ValueError(f"energy_source must be one of {ENERGY_SOURCES}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            raise ValueError(f"Unknown log level '{self.log_level}'")


class ConfigLoader:
    """Loads flat key=value configuration files."""

    def __init__(self, filepath: Optional[str] = None):
        """
        Initialize config loader.

        Args:
            filepath: Path to a key=value file (optional)
        """
        self.filepath = filepath

    def load_values(self) -> Dict[str, str]:
        """
        Read key=value pairs, one per line, '#' starting a comment.

        Returns:
            Dictionary mapping key to raw string value

        Raises:
            ValueError: If the file cannot be read or a line has no '='
        """
        if not self.filepath:
            return {}

        logger.info(f"Loading configuration from: {self.filepath}")
        try:
            df = pd.read_csv(
                self.filepath,
                sep="=",
                comment="#",
                header=None,
                names=["key", "value"],
                dtype=str,
                skipinitialspace=True,
                skip_blank_lines=True,
                engine="python",
            )
        except pd.errors.EmptyDataError:
            logger.warning(f"Config file {self.filepath} is empty")
            return {}
        except Exception as e:
            logger.error(f"Error reading config file: {e}")
            raise ValueError(f"Could not read config file {self.filepath}: {e}")

        values = {}
        for _, row in df.iterrows():
            key = str(row["key"]).strip()
            if pd.isna(row["value"]):
                raise ValueError(f"Malformed line in {self.filepath}: '{key}' has no value")
            values[key] = str(row["value"]).strip()
            logger.debug(f"Config entry {key}={values[key]}")
        return values


def _coerce(name: str, raw: Any) -> Any:
    if name == "g":
        return float(raw)
    if name == "threads":
        return int(raw)
    return str(raw)


def threads_cap_from_env() -> Optional[int]:
    """Thread cap from GRAVIDIFF_THREADS, or None when unset or invalid."""
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}")
        return None


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> Config:
    """
    Load configuration: flags > config file > defaults.

    GRAVIDIFF_THREADS caps the thread count. Without a requested count the cap is used as is.

    Args:
        path: Optional key=value config file
        overrides: Values taken from command-line flags; None entries are skipped

    Returns:
        Config object with application settings
    """
    cap = threads_cap_from_env()
    config = Config(threads=cap or 1)
    known = {f.name for f in fields(Config)}

    file_values = ConfigLoader(path).load_values() if path else {}
    updates = {}
    for key, raw in file_values.items():
        if key not in known:
            logger.warning(f"Ignoring unknown config key '{key}' in {path}")
            continue
        try:
            updates[key] = _coerce(key, raw)
        except ValueError:
            raise ValueError(f"Invalid value for '{key}' in {Path(path).name}: {raw!r}")

    for key, value in (overrides or {}).items():
        if value is not None and key in known:
            updates[key] = _coerce(key, value)

    config = replace(config, **updates)
    config.validate()
    if cap is not None and config.threads > cap:
        logger.info(f"Capping threads at {cap} ({THREADS_ENV})")
        config = replace(config, threads=cap)
    return config


def setup_logging(level: str = "WARNING") -> None:
    """
    Configure logging for the application.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
    """
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )
