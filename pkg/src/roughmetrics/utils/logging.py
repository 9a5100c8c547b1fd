"""Run logging for the roughmetrics package."""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "roughmetrics"


class _RunContext(logging.Filter):
    """Stamps every record with the command and run id of the current invocation."""

    def __init__(self, command: str, run_id: str) -> None:
        super().__init__()
        self.command = command
        self.run_id = run_id

    def filter(self, record: logging.LogRecord) -> bool:
        record.command = self.command  # type: ignore[attr-defined]
        record.run_id = self.run_id  # type: ignore[attr-defined]
        return True


class RoughLogger:
    """
    Logging for one roughmetrics invocation.

    Handlers are attached to the ``roughmetrics`` logger only, so library
    records still propagate to whatever the host application configures.
    Console output goes to stderr through rich. With a log directory each run
    gets its own file named after the start time and command, and errors of
    all runs on a day are collected in one file.
    """

    def __init__(
        self,
        log_dir: Optional[Path] = None,
        log_level: str = "INFO",
        verbose: bool = False,
        command: Optional[str] = None,
    ) -> None:
        """
        Args:
            log_dir: Directory for log files; console only when None
            log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
            verbose: Force DEBUG and show source paths
            command: CLI command name recorded on every line
        """
        self.log_dir = log_dir
        self.log_level = logging.DEBUG if verbose else getattr(logging, log_level.upper())
        self.verbose = verbose
        self.command = command or "library"
        self.started = datetime.now()
        self.run_id = self.started.strftime("%Y%m%d-%H%M%S")
        self.run_file: Optional[Path] = None

        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)

        self._configure()
        logging.getLogger(PACKAGE_LOGGER).info(f"run {self.run_id} started: {self.command}")

    def _configure(self) -> None:
        package = logging.getLogger(PACKAGE_LOGGER)
        reset_logging()
        package.setLevel(self.log_level)
        context = _RunContext(self.command, self.run_id)

        console_handler = RichHandler(
            console=Console(stderr=True),
            show_time=True,
            show_path=self.verbose,
            markup=False,
            rich_tracebacks=True,
            tracebacks_show_locals=self.verbose,
        )
        console_handler.setLevel(self.log_level)
        console_handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        package.addHandler(console_handler)

        if self.log_dir is None:
            return

        file_formatter = logging.Formatter(
            "%(asctime)s [%(command)s %(run_id)s] %(name)s %(levelname)s %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
        self.run_file = self.log_dir / f"{self.run_id}_{self.command}.log"
        run_handler = logging.FileHandler(self.run_file, encoding="utf-8")
        run_handler.setLevel(logging.DEBUG)

        errors = self.started.strftime("%Y-%m-%d")
        error_handler = logging.FileHandler(self.log_dir / f"{errors}_errors.log", encoding="utf-8")
        error_handler.setLevel(logging.ERROR)

        for handler in (run_handler, error_handler):
            handler.addFilter(context)
            handler.setFormatter(file_formatter)
            package.addHandler(handler)


def reset_logging() -> None:
    """Detach and close every handler installed on the package logger."""
    package = logging.getLogger(PACKAGE_LOGGER)
    for handler in package.handlers[:]:
        package.removeHandler(handler)
        handler.close()


@contextmanager
def stage_timer(logger: logging.Logger, stage: str) -> Iterator[None]:
    """Log the wall time of a pipeline stage at DEBUG on entry and INFO on exit."""
    logger.debug(f"{stage}: started")
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.info(f"{stage}: {time.perf_counter() - start:.3f}s")


def setup_logging(
    log_dir: Optional[Path] = None,
    log_level: str = "INFO",
    verbose: bool = False,
    command: Optional[str] = None,
) -> RoughLogger:
    """
    Set up logging for one run.

    Args:
        log_dir: Directory for log files (console only when None)
        log_level: Logging level
        verbose: Enable verbose logging
        command: CLI command name for the run file and line prefix

    Returns:
        Configured RoughLogger instance
    """
    return RoughLogger(log_dir=log_dir, log_level=log_level, verbose=verbose, command=command)
