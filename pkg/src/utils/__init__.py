"""Shared utilities: logging setup and the exception hierarchy."""

from .exceptions import ReqgenError
from .logging import get_logger, log_function_call, setup_logging

__all__ = ["ReqgenError", "get_logger", "log_function_call", "setup_logging"]
