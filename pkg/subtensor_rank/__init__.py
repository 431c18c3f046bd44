"""
Subtensor Rank Package

Exact partition-rank, slice-rank and strength computations over small fields,
vanishing polynomials for bounded partition rank, and the experiment harness
that drives them from the command line.
"""

import logging
from typing import Optional

import structlog

from .config import LOG_LEVEL

# Package version
__version__ = "1.0.0"

_logging_configured = False
_configuration_error: Optional[str] = None


def configure_logging(level: str = LOG_LEVEL) -> bool:
    """
    Configure stdlib logging and route structlog through it.

    Returns:
        bool: True if logging was configured, False otherwise
    """
    global _logging_configured, _configuration_error

    if _logging_configured:
        logging.getLogger().setLevel(getattr(logging, level.upper(), logging.INFO))
        return True

    try:
        logging.basicConfig(
            level=getattr(logging, level.upper(), logging.INFO),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        structlog.configure(
            processors=[
                structlog.stdlib.filter_by_level,
                structlog.stdlib.add_log_level,
                structlog.processors.StackInfoRenderer(),
                structlog.processors.format_exc_info,
                structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
            ],
            logger_factory=structlog.stdlib.LoggerFactory(),
            wrapper_class=structlog.stdlib.BoundLogger,
            cache_logger_on_first_use=True,
        )
        _logging_configured = True
        return True
    except Exception as e:
        _configuration_error = f"Failed to configure logging: {str(e)}"
        return False


def get_initialization_status() -> tuple[bool, Optional[str]]:
    """
    Get the current initialization status.

    Returns:
        tuple: (is_initialized, error_message)
    """
    return _logging_configured, _configuration_error


# Configure logging when the package is imported
configure_logging()

__all__ = [
    "__version__",
    "configure_logging",
    "get_initialization_status",
]
