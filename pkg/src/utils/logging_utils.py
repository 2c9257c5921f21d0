"""
Logging utilities for the semifinite verification toolkit and its front ends.
"""
import logging
import os
import sys

# Configure standard logging format
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Initialize root logger - stderr only, stdout is reserved for reports
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL),
    format=LOG_FORMAT,
    handlers=[
        logging.StreamHandler(sys.stderr)
    ]
)

def get_logger(name):
    """
    Get a logger with the specified name and consistent formatting.

    Args:
        name: The name of the logger, typically the component name

    Returns:
        A configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, LOG_LEVEL))
    return logger

def log_check_started(logger, check_name, **kwargs):
    """
    Log the start of a verification check with consistent format.

    Args:
        logger: The logger instance
        check_name: Name of the check (e.g., 'young_sv', 'compression')
        **kwargs: Additional fields to log
    """
    extra_fields = ", ".join(f"{k}={v}" for k, v in kwargs.items())
    logger.debug(f"CHECK {check_name}: started {extra_fields}")

def log_check_finished(logger, report, elapsed=None):
    """
    Log the outcome of a verification check.

    Failed checks are logged at WARNING so they surface in campaign output.

    Args:
        logger: The logger instance
        report: The VerificationReport produced by the check
        elapsed: Optional elapsed seconds
    """
    status = "PASS" if report.passed else "FAIL"
    timing = f" in {elapsed:.4f}s" if elapsed is not None else ""
    message = f"CHECK {report.name}: {status} worst_margin={format_margin(report.worst_margin)}{timing}"
    if report.passed:
        logger.debug(message)
    else:
        logger.warning(message)

def format_margin(value):
    """
    Format a margin for logging without losing the sign of tiny values.

    Args:
        value: The margin to format

    Returns:
        Formatted margin string
    """
    if value is None:
        return "n/a"
    return f"{value:.6e}"
