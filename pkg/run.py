#!/usr/bin/env python3
"""Oscillatory Jacobi Lab - Entry point"""

import sys
from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
