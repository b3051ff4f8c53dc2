"""Time the compiled and pure-Python NL-means kernels on the same images.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 32,64,128] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from rclbp import nlmeans
from rclbp.imagecore import NoiseSpec, inject_gaussian_noise, synth_texture


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="32,64,128", help="comma-separated square image sizes")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--search-radius", type=int, default=10)
    ap.add_argument("--patch-radius", type=int, default=3)
    args = ap.parse_args(argv)

    backends = nlmeans.available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace` first")
    p = nlmeans.NlMeansParams(args.search_radius, args.patch_radius)
    print(f"search_radius={p.search_radius} patch_radius={p.patch_radius} repeat={args.repeat} (best time)")
    print(f"{'size':>6} " + " ".join(f"{b:>10}" for b in backends) + ("    speedup" if len(backends) > 1 else ""))
    for size in (int(s) for s in args.sizes.split(",")):
        img = inject_gaussian_noise(synth_texture("sinusoid", size, 8), NoiseSpec(20.0, 1))
        best = {}
        outs = {}
        for b in backends:
            outs[b] = nlmeans.nl_means_filter(img, p, backend=b)
            t = timeit.repeat(lambda: nlmeans.nl_means_filter(img, p, backend=b), number=1, repeat=args.repeat)
            best[b] = min(t)
        line = f"{size:>6} " + " ".join(f"{best[b] * 1e3:>8.1f}ms" for b in backends)
        if len(backends) > 1:
            diff = float(np.max(np.abs(outs["cython"] - outs["python"])))
            line += f"  {best['python'] / best['cython']:>8.2f}x  (max diff {diff:.1e})"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
