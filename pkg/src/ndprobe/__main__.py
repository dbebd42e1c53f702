"""Module entry point: python -m ndprobe."""

import sys

from .cli import main

sys.exit(main())
