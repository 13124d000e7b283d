"""Time the numba and numpy kernel paths against each other.

    python benchmarks/bench_kernels.py [--sizes 40,160,640] [--repeats 3]

For each grid a coherent beam with mean photon number ~ size/1.5 is sent
through one 50:50 splitter (``exp_hop_blocks``) and one hopping apply
(``hop_grid``). Reports best-of-N wall time and the max deviation between paths.
"""

import argparse
import math
import time

import numpy as np

from qmb import kernels
from qmb.errors import TruncationError
from qmb.fock import coherent_state, fock_state, tensor


def best_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", default="40,160,640", help="comma-separated Fock cutoffs")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)

    # compile outside the timed region
    warm = np.zeros((3, 3), dtype=np.complex128)
    warm[1, 0] = 1
    kernels.exp_hop_blocks(warm, 0.7, impl="numba")
    kernels.hop_grid_numba(warm)

    print(f"{'cutoff':>7} {'kernel':>14} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8} {'max |diff|':>11}")
    for cutoff in (int(s) for s in args.sizes.split(",")):
        nbar = cutoff / 1.5
        # coherent_state may need a larger grid than the target; shrink nbar until it fits
        while True:
            try:
                a = coherent_state(math.sqrt(nbar), cutoff)
                break
            except TruncationError:
                nbar *= 0.9
        psi = np.ascontiguousarray(tensor(a, fock_state(0, cutoff)).amplitudes)
        for name, nb, npy in (
            ("exp_hop_blocks", lambda: kernels.exp_hop_blocks(psi, math.pi / 4, impl="numba"),
             lambda: kernels.exp_hop_blocks(psi, math.pi / 4, impl="numpy")),
            ("hop_grid", lambda: kernels.hop_grid_numba(psi), lambda: kernels.hop_grid_numpy(psi)),
        ):
            t_nb, o_nb = best_time(nb, args.repeats)
            t_np, o_np = best_time(npy, args.repeats)
            diff = float(np.max(np.abs(o_nb - o_np)))
            print(f"{cutoff:>7} {name:>14} {t_nb:>11.4f} {t_np:>11.4f} {t_np / t_nb:>8.1f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
