import logging

from rich.console import Console
from rich.logging import RichHandler

from settings import load_settings

# Global logging configuration
# Root stays at CRITICAL so numpy/scipy/matplotlib chatter is suppressed.
# Logs go to stderr: stdout carries symbol streams and reports.
logging.basicConfig(
  level="CRITICAL",
  format="%(message)s",
  datefmt="[%X]",
  handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)]
)

APP_LOGGER_NAME = "reductions"


class AppLogger(logging.LoggerAdapter):
  """
  A logger adapter that prefixes log messages with a module tag.

  Every module creates one at import time, e.g. ``AppLogger("[Restart]")``.
  The level of the shared application logger comes from
  ``REDUCTIONS_LOG_LEVEL`` (see ``settings.py``) and can be raised later by
  the CLI with :func:`set_level`.

  Attributes:
    extra (dict): A dictionary containing the prefix information.
  """

  def __init__(self, prefix: str):
    """
    Args:
      prefix (str): The tag prepended to every message (e.g. "[Sampler]").
    """
    logger = logging.getLogger(APP_LOGGER_NAME)

    # Explicitly set the application level despite the CRITICAL root.
    logger.setLevel(load_settings().log_level)

    super().__init__(logger, {"prefix": prefix})

  def process(self, msg, kwargs):
    """
    Injects the prefix into the message.

    Returns:
      tuple: The prefixed message and the untouched keyword arguments.
    """
    return f"{self.extra['prefix']} {msg}", kwargs


def set_level(level: str) -> None:
  """Change the level of the shared application logger (e.g. from ``-v``)."""
  logging.getLogger(APP_LOGGER_NAME).setLevel(level.upper())
