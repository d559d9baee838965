#!/usr/bin/env python3
"""Master replication chain: headline + sweeps, episodes, r3, nulls, cot.

Runs on the bundled CSVs when present (REGIMELAB_DATA_DIR or ./data) and
falls back to the synthetic intermediary panel for the headline block when
the monthly file is missing. Same as `regimelab run-all`.

Usage: python scripts/run_all.py [--out results] [--seed 1] [extra run-all flags]
"""

import sys

from regimelab.cli import main

if __name__ == "__main__":
    sys.exit(main(["run-all", *sys.argv[1:]]))
