"""Write the data behind every figure family under figures/<name>/.

Usage: python3 scripts/reproduce_figures.py [--out figures] [--workers N]
"""
import argparse
import time

from qfi_lab.figures import FigureName, FigureRecipe, figure, write_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--catenary-bbar", type=float, default=0.5)
    ap.add_argument("--circular-bbar", type=float, default=2.0)
    args = ap.parse_args()
    for name in FigureName:
        t0 = time.perf_counter()
        recipe = FigureRecipe(name, catenary_bbar=args.catenary_bbar,
                              circular_bbar=args.circular_bbar, workers=args.workers)
        paths = write_figure(figure(recipe), f"{args.out}/{name.value}")
        print(f"{name.value:6s} {len(paths) - 1:3d} curves  {time.perf_counter() - t0:6.2f} s")


if __name__ == "__main__":
    main()
