"""Environment variable loader for the proofnets tools."""
import logging
import os
from typing import Any, Callable, Dict

from dotenv import load_dotenv

from proofnets.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 1 << 22
DEFAULT_CPT_TOL = 1e-9
DEFAULT_VERIFY_TOL = 1e-9
DEFAULT_LOG_LEVEL = "WARNING"

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _read(name: str, default: Any, convert: Callable[[str], Any]) -> Any:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        logger.debug(f"{name} not found in environment variables. Using default {default!r}.")
        return default
    try:
        return convert(raw.strip())
    except ValueError as e:
        raise ConfigError(f"Invalid value for {name}: {raw!r} ({str(e)})") from e


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value <= 0:
        raise ValueError("must be a positive integer")
    return value


def _tolerance(raw: str) -> float:
    value = float(raw)
    if not value >= 0.0:
        raise ValueError("must be a nonnegative number")
    return value


def _log_level(raw: str) -> str:
    value = raw.upper()
    if value not in _LOG_LEVELS:
        raise ValueError(f"expected one of {', '.join(_LOG_LEVELS)}")
    return value


def load_env_vars() -> Dict[str, Any]:
    """Load settings from the environment (and a .env file if present).

    Returns:
        Dictionary with keys state_cap, cpt_tol, verify_tol and log_level.
    """
    load_dotenv()

    return {
        "state_cap": _read("BPN_STATE_CAP", DEFAULT_STATE_CAP, _positive_int),
        "cpt_tol": _read("BPN_CPT_TOL", DEFAULT_CPT_TOL, _tolerance),
        "verify_tol": _read("BPN_VERIFY_TOL", DEFAULT_VERIFY_TOL, _tolerance),
        "log_level": _read("BPN_LOG_LEVEL", DEFAULT_LOG_LEVEL, _log_level),
    }
