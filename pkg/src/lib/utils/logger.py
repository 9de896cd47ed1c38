import logging
from logging import Logger

from rich.console import Console
from rich.logging import RichHandler
from rich.traceback import install as install_rich_tracebacks

from config import LOG_LEVEL

LOGGER_NAME = "burniat"


def get_logger(name: str = LOGGER_NAME) -> Logger:
    """Set up a logger with RichHandler on stderr; stdout is reserved for reports."""
    install_rich_tracebacks(show_locals=False, suppress=[__file__])

    console = Console(stderr=True, highlight=True, log_time_format="[%H.%M]")

    logger = logging.getLogger(name)
    logger.setLevel(LOG_LEVEL)

    if logger.hasHandlers():
        logger.handlers.clear()

    rich_handler = RichHandler(
        console=console,
        show_time=True,
        show_level=True,
        show_path=True,
        markup=True,  # e.g. [bold red]GAP[/bold red]
        rich_tracebacks=True,
        tracebacks_word_wrap=True,
    )

    logger.addHandler(rich_handler)
    logger.propagate = False
    return logger


if __name__ == "__main__":
    logger = get_logger()

    # --- Demo ---
    logger.debug("pivot [cyan]u3[/cyan] -> s7")
    logger.info("Verified [bold green]6[/bold green] tilings.")
    logger.warning("piece '[yellow]M3[/yellow]' misses the relative interior")
