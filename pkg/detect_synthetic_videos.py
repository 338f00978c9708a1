#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
StreetForensics - synthetic driving-video detector CLI
Build corpora, train the Xception detector and reproduce the accuracy tables.
"""

import os
import sys

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

try:
    from streetforensics.cli import run
except ImportError as e:
    print("Error: could not import the streetforensics package.", file=sys.stderr)
    print(f"   Details: {e}", file=sys.stderr)
    print("   Install dependencies with: pip install -r requirements.txt", file=sys.stderr)
    sys.exit(1)


if __name__ == "__main__":
    sys.exit(run())
