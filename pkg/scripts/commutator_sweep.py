"""Write the quadrature-order sweep of the commutator kernel comparison as CSV."""
import argparse

from wienerns.cli import plot_data

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sweeps")
    ap.add_argument("--grid", type=int, default=16)
    a = ap.parse_args()
    print(plot_data("commutator", a.out, a.grid))
