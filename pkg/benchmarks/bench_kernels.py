"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py --points 500 2000 --repeat 5
"""
import argparse
import math
import timeit

import numpy as np

from worstcase.geometry import Window, available_backends, delaunay, get_kernels, sample_ppp, voronoi_vertices


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(n_points: int, repeat: int, seed: int = 0) -> dict:
    pat = sample_ppp(1.0, Window(math.sqrt(n_points / math.pi), 1.0), seed)
    verts = voronoi_vertices(pat, delaunay(pat))
    pos = np.ascontiguousarray(verts.positions)
    fades = np.random.default_rng(seed).standard_exponential((len(pos), len(pat)))
    out = {}
    for backend in available_backends():
        kern = get_kernels(backend)
        out[backend] = (
            _best(lambda: delaunay(pat, backend=backend), repeat),
            _best(lambda: kern.path_gain_sums(pos, pat.points, fades, 4.0), repeat),
        )
    return {"n": len(pat), "vertices": len(pos), "times": out}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, nargs="+", default=[200, 1000, 1450])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = available_backends()
    if len(backends) < 2:
        print("compiled kernels not built; only timing the Python fallback")
    print(f"{'points':>7} {'verts':>6} {'kernel':>15} " + " ".join(f"{b:>10}" for b in backends)
          + ("    speedup" if len(backends) > 1 else ""))
    for n in args.points:
        res = bench(n, args.repeat)
        for k, name in enumerate(("delaunay", "path_gain_sums")):
            ts = [res["times"][b][k] for b in backends]
            line = f"{res['n']:>7} {res['vertices']:>6} {name:>15} " + " ".join(f"{t * 1e3:>8.2f}ms" for t in ts)
            if len(ts) > 1:
                line += f"  {ts[1] / ts[0]:>8.1f}x"
            print(line)


if __name__ == "__main__":
    main()
