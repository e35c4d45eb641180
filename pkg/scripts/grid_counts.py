"""Decision-set sizes on 3 x m grids: s-t paths (m = 3..10) and corner Steiner trees (m = 3, 4)."""
import argparse
import time

from zddbandit.builder import GridSpec, brute_force_steiner_trees, build_grid, build_st_paths, reduce_from_family
from zddbandit.zdd import count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-cols", type=int, default=10)
    ap.add_argument("--steiner-cols", type=int, default=4, help="largest width for the brute-force tree scan")
    args = ap.parse_args()

    print("problem  grid   |S|        |V|   seconds")
    for m in range(3, args.max_cols + 1):
        t0 = time.perf_counter()
        g = build_grid(GridSpec(3, m))
        z = build_st_paths(g, g.start, g.goal)
        print(f"osp      3x{m:<3} {count(z):<10} {z.n_vertices:<5} {time.perf_counter() - t0:.2f}")
    for m in range(3, args.steiner_cols + 1):
        t0 = time.perf_counter()
        g = build_grid(GridSpec(3, m))
        z = reduce_from_family(brute_force_steiner_trees(g, g.terminals), g.d)
        print(f"dst      3x{m:<3} {count(z):<10} {z.n_vertices:<5} {time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
