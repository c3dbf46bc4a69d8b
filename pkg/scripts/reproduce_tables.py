"""Print both DoF tables, or write them as CSV with --out-dir."""

import argparse
import sys

from dcsit_ia.cli import main


def run(out_dir=None):
    if out_dir is None:
        return main(["table"])
    return main(["table", "--format", "csv", "--out", f"{out_dir}/tables.csv"])


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default=None)
    sys.exit(run(p.parse_args().out_dir))
