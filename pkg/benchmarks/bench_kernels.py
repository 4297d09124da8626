"""Compare the numba kernels with the numpy fallback.

Each backend runs in its own interpreter because the choice is made at import
time from POLYSKEL_DISABLE_JIT.  Usage:

    python3 benchmarks/bench_kernels.py [--repeats 5] [--json out.json]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from polyskel import _kernels
from polyskel.core import make_ledger
from polyskel.edgecheck import compute_skeleton
from polyskel.edgecheck.numeric import _scale_for, _start_vector
from polyskel.families import birkhoff_vertices, enum_cgp_vertices, enum_cim_vertices
from polyskel.rhombus import sorted_groups

repeats = int(sys.argv[1])


def best(fn):
    fn()  # warm-up, includes compilation
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return min(out)


cim = enum_cim_vertices(5).array
rng = np.random.default_rng(0)
pairs = rng.integers(0, len(cim), size=(200, 2))
face = best(lambda: [_kernels.face_mask(cim, cim[a], cim[b]) for a, b in pairs])

b6 = birkhoff_vertices(6)
led = make_ledger(b6)
_, new_group = sorted_groups(led.sum_keys, (0, 2))
partners = best(lambda: _kernels.group_partners(new_group))

cgp = enum_cgp_vertices(5)
Xi = cgp.array.astype(np.int64)
X = Xi.astype(np.float64)
scale = _scale_for(Xi)
jobs = []
for a, b in rng.integers(0, len(cgp), size=(100, 2)):
    if a == b:
        continue
    r = np.random.default_rng([a, b])
    delta = X[a] - X[b]
    jobs.append((a, b, _start_vector(r, delta, float(delta @ delta)),
                 r.uniform(-1, 1, (100, X.shape[1]))))
search = best(lambda: [_kernels.numeric_search(X, Xi, a, b, c0, rnd, 1e-6, 1e-9, 100, scale)
                       for a, b, c0, rnd in jobs])

skeleton = best(lambda: compute_skeleton(birkhoff_vertices(5), seed=0))
print(json.dumps({"backend": _kernels.backend(), "face_mask x200 (CIM_5)": face,
                  "group_partners (B_6 ledger)": partners,
                  "numeric_search x100 (CGP_5)": search,
                  "compute_skeleton (B_5)": skeleton}))
"""


def run_backend(disable: bool, repeats: int) -> dict:
    env = dict(os.environ, POLYSKEL_DISABLE_JIT="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeats)], env=env, check=True,
                         capture_output=True, text=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--json", help="also write the raw timings here")
    args = ap.parse_args(argv)
    jit = run_backend(False, args.repeats)
    ref = run_backend(True, args.repeats)
    print(f"{'kernel':<32}{jit['backend']:>12}{ref['backend']:>12}{'speedup':>10}")
    for key in jit:
        if key == "backend":
            continue
        print(f"{key:<32}{jit[key]:>11.4f}s{ref[key]:>11.4f}s{ref[key] / jit[key]:>9.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"jit": jit, "fallback": ref}, fh, indent=2)


if __name__ == "__main__":
    main()
