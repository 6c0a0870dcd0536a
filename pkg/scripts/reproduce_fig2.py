#!/usr/bin/env python3
"""Run both figure configurations and write sweeps + summary to ./fig2_out."""
import sys

from se3geo.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "fig2_out"
    sys.exit(main(["reproduce-fig2", "--out", out]))
