"""External interfaces - the command line front end."""

from .cli import main as cli_main

__all__ = ["cli_main"]
