"""Entry point for ``python -m quotegraph``."""

import sys

from .cli import main

sys.exit(main())
