"""Module entry point: ``python -m cspkit``."""

import sys

from .cli import script_main

if __name__ == "__main__":
    sys.exit(script_main())
