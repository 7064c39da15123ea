"""
Configuration module for the reduction toolkit.
Loads enumeration limits and logging settings from a .env file.
"""

import logging
import os
import sys

import numpy as np
from dotenv import load_dotenv

logger = logging.getLogger(__name__)


def env_search_paths():
    """Candidate .env files; the first one found is loaded."""
    if getattr(sys, 'frozen', False):
        # Running as a PyInstaller executable
        application_path = os.path.dirname(sys.executable)
        bundle_dir = getattr(sys, '_MEIPASS', os.path.abspath(os.path.dirname(__file__)))
        # 1. Same directory as executable (external .env)
        # 2. PyInstaller temp folder (embedded .env)
        return [
            os.path.join(application_path, '.env'),
            os.path.join(bundle_dir, '.env'),
        ]
    application_path = os.path.dirname(os.path.abspath(__file__))
    return [os.path.join(application_path, '.env')]


def load_first_env(paths):
    """Load the first existing .env in `paths` and return it, or None."""
    for env_path in paths:
        if os.path.exists(env_path) and load_dotenv(env_path):
            return env_path
    return None


# Lattice entries and feasibility bounds are printed as decimal big integers
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

env_loaded = load_first_env(env_search_paths())


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    return int(raw.strip(), 0)


def _env_bool(name: str, default: bool = False) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


class Config:
    """Configuration class for enumeration budgets and logging."""

    # Oracle limits
    ENUMERATION_BUDGET = _env_int("ENUMERATION_BUDGET", 2 ** 24)
    FULL_ENUMERATION_MAX_DIM = _env_int("FULL_ENUMERATION_MAX_DIM", 24)

    # Construction limits
    MAX_MATRIX_ENTRIES = _env_int("MAX_MATRIX_ENTRIES", 2 ** 24)
    REPORT_MAX_BITS = _env_int("REPORT_MAX_BITS", 2 ** 20)

    DEFAULT_SEED = _env_int("DEFAULT_SEED", 0)

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING").upper()
    DEBUG = _env_bool("DEBUG")
    LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    _logging_configured = False

    @classmethod
    def validate(cls):
        """Validate that the configured limits are usable."""
        for name in ("ENUMERATION_BUDGET", "FULL_ENUMERATION_MAX_DIM",
                     "MAX_MATRIX_ENTRIES", "REPORT_MAX_BITS"):
            if getattr(cls, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if cls.DEFAULT_SEED < 0:
            raise ValueError("DEFAULT_SEED must be non-negative")
        return True

    @classmethod
    def budget(cls, override=None) -> int:
        """Return the enumeration budget, preferring an explicit override."""
        if override is None:
            return cls.ENUMERATION_BUDGET
        if override <= 0:
            raise ValueError("budget must be positive")
        return override

    @classmethod
    def configure_logging(cls, level=None):
        """Install the root handler once; later calls only adjust the level."""
        if level is None:
            level = logging.DEBUG if cls.DEBUG else getattr(logging, cls.LOG_LEVEL, logging.WARNING)
        if not cls._logging_configured:
            logging.basicConfig(level=level, format=cls.LOG_FORMAT, stream=sys.stderr)
            cls._logging_configured = True
            if env_loaded:
                logger.debug("Loaded .env from: %s", env_loaded)
        logging.getLogger().setLevel(level)


def make_rng(seed=None):
    """numpy Generator from a seed, an existing Generator, or Config.DEFAULT_SEED."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(Config.DEFAULT_SEED if seed is None else seed)
