import logging

# Create a root logger
logger = logging.getLogger(__name__)

# Create the terminal handler
shell_handler = logging.StreamHandler()

# Set levels for the logger and shell
logger.setLevel(logging.DEBUG)
shell_handler.setLevel(logging.INFO)

# Format the outputs
fmt_file = "%(levelname)s (%(asctime)s): %(message)s"
fmt_shell = "%(levelname)s [%(funcName)s:] %(message)s"

# Create formatters
shell_formatter = logging.Formatter(fmt_shell)
file_formatter = logging.Formatter(fmt_file)

# Add formatters to handlers
shell_handler.setFormatter(shell_formatter)

# Add handlers to the logger
logger.addHandler(shell_handler)


def add_file_handler(path) -> logging.FileHandler:
    """Attach a run log file to the logger. Returns the handler so the caller
    can detach it once the run is finished."""
    file_handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(file_formatter)
    logger.addHandler(file_handler)

    return file_handler


def remove_handler(handler: logging.Handler) -> None:
    logger.removeHandler(handler)
    handler.close()
