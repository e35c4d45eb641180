"""Path ZDDs for user-supplied network edge lists (e.g. MCI, ATT converted from Topology Zoo)."""
import argparse
import time

from zddbandit.builder import bfs_edge_order, build_st_paths, read_graph
from zddbandit.zdd import count, max_cardinality


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("graphs", nargs="+", help="edge-list files with start/goal lines")
    ap.add_argument("--bfs", action="store_true", help="also report |V| under breadth-first edge order")
    args = ap.parse_args()
    for path in args.graphs:
        with open(path) as fh:
            g = read_graph(fh)
        t0 = time.perf_counter()
        z = build_st_paths(g, g.start, g.goal)
        line = (f"{path}: nodes {g.n_nodes} edges {g.d} paths {count(z)} |V| {z.n_vertices} "
                f"longest {max_cardinality(z)} ({time.perf_counter() - t0:.1f}s)")
        if args.bfs:
            zb = build_st_paths(g, g.start, g.goal, edge_order=bfs_edge_order(g, g.start))
            line += f" |V|(bfs) {zb.n_vertices}"
        print(line)


if __name__ == "__main__":
    main()
