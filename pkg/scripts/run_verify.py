#!/usr/bin/env python3
"""Run a verification suite (default: all) and exit nonzero on failure."""
import sys

from se3geo.cli import main

if __name__ == "__main__":
    suite = sys.argv[1] if len(sys.argv) > 1 else "all"
    seed = sys.argv[2] if len(sys.argv) > 2 else "0"
    sys.exit(main(["verify", suite, "--seed", seed]))
