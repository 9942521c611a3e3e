"""Write the n = 32, 64 resolution sweep of the sublevel energy audit as CSV."""
import argparse

from wienerns.cli import plot_data

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sweeps")
    a = ap.parse_args()
    print(plot_data("sublevel", a.out))
