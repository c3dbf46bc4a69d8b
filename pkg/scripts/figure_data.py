"""DoF versus K for both channels, with the asymptotic limit as a column."""

import argparse
import sys

from dcsit_ia.cli import main


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-max", type=int, default=75)
    p.add_argument("--out-dir", default=".")
    a = p.parse_args()
    codes = [main(["figure", "--channel", ch, "--k-max", str(a.k_max),
                   "--out", f"{a.out_dir}/figure_{ch}.csv"]) for ch in ("ic", "x")]
    sys.exit(max(codes))
