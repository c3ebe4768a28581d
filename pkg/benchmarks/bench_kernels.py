"""Time the numba kernels against the numpy fallback.

Each backend runs in its own interpreter (the backend is picked at import
time from HARMWEB_NUMBA).  The child prints one JSON line with timings and
the canonical codes it produced; the parent checks that both backends agree.

    python3 benchmarks/bench_kernels.py [--degree 4] [--count 10] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time


def child(degree, count, repeat):
    import numpy as np

    from harmweb import _kernels
    from harmweb.diagram import canonical_form, web_to_diagram
    from harmweb.poly import random_monic, roots
    from harmweb.webtrace import extract_web

    t0 = time.perf_counter()
    _kernels.warmup()
    warm = time.perf_counter() - t0

    rng = np.random.default_rng(1234)
    polys = [random_monic(rng, degree) for _ in range(count)]
    coef = polys[0].full
    xs = np.linspace(-3, 3, 801)

    def best(fn):
        out = []
        for _ in range(repeat):
            t = time.perf_counter()
            fn()
            out.append(time.perf_counter() - t)
        return min(out)

    codes = []

    def trace_all():
        codes.clear()
        for P in polys:
            try:
                codes.append(canonical_form(web_to_diagram(extract_web(P))))
            except Exception as exc:  # noqa: BLE001 - recorded, not fatal
                codes.append(f"error: {type(exc).__name__}")

    res = {
        "backend": _kernels.BACKEND,
        "warmup": warm,
        "roots": best(lambda: [roots(P) for P in polys]),
        "eval_grid": best(lambda: _kernels.eval_grid(coef, xs, xs)),
        "extract_web": best(trace_all),
        "codes": codes,
    }
    print(json.dumps(res))


def run(flag, args):
    env = dict(os.environ, HARMWEB_NUMBA=flag)
    cmd = [sys.executable, __file__, "--child", "--degree", str(args.degree),
           "--count", str(args.count), "--repeat", str(args.repeat)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true")
    args = ap.parse_args()
    if args.child:
        child(args.degree, args.count, args.repeat)
        return 0
    fast, slow = run("1", args), run("0", args)
    print(f"degree {args.degree}, {args.count} polynomials, best of {args.repeat}")
    print(f"{'kernel':<12} {slow['backend']:>10} {fast['backend']:>10} {'speedup':>8}")
    for key in ("roots", "eval_grid", "extract_web"):
        print(f"{key:<12} {slow[key]:>10.4f} {fast[key]:>10.4f} {slow[key] / fast[key]:>7.1f}x")
    print(f"numba warmup (compile) {fast['warmup']:.2f}s")
    same = fast["codes"] == slow["codes"]
    print(f"backends agree on all diagrams: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
