#!/usr/bin/env python3
"""Command-line entry point for repzeta."""

import logging
import sys

try:
    from dotenv import load_dotenv
    load_dotenv()
except Exception:
    pass

from config import settings

from lib.cli import main

logging.basicConfig(
    level=getattr(logging, settings.log_level, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)


if __name__ == "__main__":
    sys.exit(main())
