#!/usr/bin/env python3
"""
Object counter command line.

Usage:
    python count_objects.py count [options] FILE...
    python count_objects.py gen --profile clean|noisy|occluded --n N --seed S --out DIR
    python count_objects.py eval --corpus DIR [options]
"""
import sys

from dotenv import load_dotenv

load_dotenv()

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
