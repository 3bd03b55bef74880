from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

_HANDLER_NAME = "grassmann-euclid"


def configure_logging(verbose: bool = False) -> logging.Logger:
    """Install one RichHandler on the root logger, writing to stderr.

    Calling it again only adjusts the level.
    """
    root = logging.getLogger()
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    if not any(getattr(h, "name", None) == _HANDLER_NAME for h in root.handlers):
        handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
        handler.set_name(_HANDLER_NAME)
        root.addHandler(handler)
    return root
