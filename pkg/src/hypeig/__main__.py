"""Allow ``python -m hypeig``."""

import sys

from .cli import main

sys.exit(main())
