"""Entry point for ``python -m bosonlab`` and the ``bosonlab`` script."""

from __future__ import annotations

import sys
from typing import Optional

from bosonlab.interfaces.cli import main as cli_main


def main(argv: Optional[list[str]] = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    return cli_main(args)


if __name__ == "__main__":  # pragma: no cover - manual execution
    sys.exit(main())
