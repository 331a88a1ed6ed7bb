#!/usr/bin/env python3
"""gravidiff - Main entry point."""

import sys
from gravidiff.cli import main

if __name__ == "__main__":
    sys.exit(main())
