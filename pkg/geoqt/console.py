# SPDX-License-Identifier: BUSL-1.1
"""Logging setup and human-readable summaries on stderr."""

import logging
from typing import Mapping, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from geoqt.output import format_float

_stderr: Optional[Console] = None


def stderr_console() -> Console:
    global _stderr
    if _stderr is None:
        _stderr = Console(stderr=True)
    return _stderr


def log_level(quiet: bool = False, verbose: int = 0) -> int:
    if quiet:
        return logging.ERROR
    if verbose > 0:
        return logging.DEBUG
    return logging.WARNING


def setup_logging(quiet: bool = False, verbose: int = 0) -> logging.Logger:
    """Route the geoqt logger tree to a RichHandler on stderr."""
    logger = logging.getLogger("geoqt")
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=stderr_console(),
        show_time=False,
        show_path=verbose > 0,
        rich_tracebacks=verbose > 0,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(log_level(quiet, verbose))
    logger.propagate = False
    return logger


def _display(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format_float(value) or str(value)
    return str(value)


def print_summary(title: str, values: Mapping, console: Optional[Console] = None) -> None:
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in values.items():
        table.add_row(str(key), _display(value))
    (console or stderr_console()).print(table)
