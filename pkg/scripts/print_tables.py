"""Print the H^1 dimension tables and a summary of the invariant-operator grid.

    python scripts/print_tables.py            # H^1 tables, n = 2..5
    python scripts/print_tables.py --grid 2   # also the n = 2 invariant grid
"""
import argparse
from collections import defaultdict
from fractions import Fraction

from supercontact.cli import H1_TABLE, h1_table, invariant_grid


def show_h1(n: int) -> None:
    res = h1_table(n)
    rows = defaultdict(list)
    for r in res["points"]:
        rows[r["mu"] - r["lambda"]].append(r)
    print(f"n = {n}  (operator order <= {res['max_order']})")
    print("  mu-lam   dims at lambda samples   expected")
    for shift in sorted(rows):
        dims = ", ".join(f"{r['h1_dim']} @ {r['lambda']}" for r in rows[shift])
        flag = "" if all(r["pass"] for r in rows[shift]) else "   MISMATCH"
        print(f"  {str(shift):>6}   {dims:<24} {rows[shift][0]['expected']}{flag}")


def show_grid(n: int) -> None:
    res = invariant_grid(n)
    hist = defaultdict(int)
    for r in res["points"]:
        hist[(r["nu"] - r["lambda"] - r["mu"], r["dim"])] += 1
    print(f"invariant grid n = {n}: {len(res['points'])} points, all pass = {res['all_pass']}")
    for (off, dim), count in sorted(hist.items()):
        print(f"  nu-lam-mu = {str(off):>4}: dim {dim} at {count} points")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--grid", type=int, action="append", default=[], help="also summarise the grid for this n")
    ap.add_argument("--n", type=int, action="append", help="restrict the H^1 tables to these n")
    a = ap.parse_args()
    for n in a.n or sorted(H1_TABLE):
        show_h1(n)
    for n in a.grid:
        show_grid(n)


if __name__ == "__main__":
    main()
