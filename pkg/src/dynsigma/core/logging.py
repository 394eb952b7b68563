import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from loguru import logger

VALID_ENVIRONMENTS = {"development", "testing", "production"}

CONSOLE_FORMAT = "{time:HH:mm:ss.SSS} | {level} | {name}:{function}:{line} | {message}"
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level} | {name}:{function}:{line} | {message}"


@dataclass(frozen=True)
class LoggingEnv:
    name_app: str
    run_environment: str
    path_to_logs: Optional[str]
    max_size: str
    max_files: object


# run_environment -> (console level or None, file sink enabled)
_SINKS = {
    "development": ("DEBUG", False),
    "testing": ("INFO", True),
    "production": (None, True),
}


def _fatal_env(message: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level="ERROR", format="{time:HH:mm:ss.SSS} | {level} | {message}")
    logger.error("dynsigma cannot start: {}", message)
    logger.complete()
    raise SystemExit(1)


def _required(name: str) -> str:
    value = os.getenv(name)
    if not value:
        _fatal_env(f"environment variable {name} is not set")
    return value


def read_logging_env() -> LoggingEnv:
    name_app = _required("NAME_APP")
    run_environment = _required("RUN_ENVIRONMENT")
    if run_environment not in _SINKS:
        _fatal_env(f"RUN_ENVIRONMENT={run_environment!r}, expected one of {sorted(VALID_ENVIRONMENTS)}")

    # file sinks need a directory
    path_to_logs = _required("PATH_TO_LOGS") if _SINKS[run_environment][1] else os.getenv("PATH_TO_LOGS")

    max_files_raw = os.getenv("LOG_MAX_FILES", "5")
    try:
        max_files: object = int(max_files_raw)
    except ValueError:
        max_files = max_files_raw

    return LoggingEnv(
        name_app=name_app,
        run_environment=run_environment,
        path_to_logs=path_to_logs,
        max_size=os.getenv("LOG_MAX_SIZE", "5 MB"),
        max_files=max_files,
    )


def configure_logging(console_level: Optional[str] = None) -> LoggingEnv:
    """Install the sinks for RUN_ENVIRONMENT.

    ``console_level`` (the CLI's ``--log-level``) overrides the terminal level
    but never enables a terminal sink in production.
    """
    env = read_logging_env()
    default_console, file_enabled = _SINKS[env.run_environment]

    logger.remove()
    if default_console is not None:
        logger.add(
            sys.stderr,
            level=console_level or default_console,
            format=CONSOLE_FORMAT,
            backtrace=True,
            diagnose=True,
        )

    if file_enabled:
        log_dir = Path(env.path_to_logs)
        log_dir.mkdir(parents=True, exist_ok=True)
        logger.add(
            str(log_dir / f"{env.name_app}.log"),
            level="INFO",
            format=FILE_FORMAT,
            rotation=env.max_size,
            retention=env.max_files,
            enqueue=True,
            backtrace=True,
            diagnose=True,
        )

    _install_exception_hook()
    return env


def configure_worker_logging(name_app: str) -> None:
    """Initializer for scan worker processes: stderr only, tagged with the worker name."""
    logger.remove()
    logger.configure(extra={"worker": f"{name_app}-worker-{os.getpid()}"})
    logger.add(
        sys.stderr,
        level="WARNING",
        format="{time:HH:mm:ss.SSS} | {level} | {extra[worker]} | {message}",
        enqueue=True,
    )


def _install_exception_hook() -> None:
    def handle_exception(exc_type, exc_value, exc_traceback) -> None:
        if exc_type is KeyboardInterrupt:
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return
        logger.opt(exception=(exc_type, exc_value, exc_traceback)).critical(
            "Uncaught exception"
        )
        logger.complete()

    sys.excepthook = handle_exception
