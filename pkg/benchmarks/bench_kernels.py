"""Compare the compiled kernels with the NumPy fallback.

Times the two per-time-point kernels on random inputs of growing size, then
a full scan (propagation plus spectrum) with each backend swapped in.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--spins 6 8 10]
"""

import argparse
import time
from contextlib import contextmanager

import numpy as np

import mqnmr.coherence
import mqnmr.dynamics
from mqnmr import _kernels_py
from mqnmr.basis import build_basis, equilibrium_state
from mqnmr.coherence import mq_spectrum
from mqnmr.dynamics import evolve_prepared, prepare, propagator_for
from mqnmr.geometry import ring_couplings

try:
    from mqnmr import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


@contextmanager
def backend(mod):
    saved = mqnmr.dynamics.phase_rotate, mqnmr.coherence.coherence_sums
    mqnmr.dynamics.phase_rotate = mod.phase_rotate
    mqnmr.coherence.coherence_sums = mod.coherence_sums
    try:
        yield
    finally:
        mqnmr.dynamics.phase_rotate, mqnmr.coherence.coherence_sums = saved


def bench_kernels(spins, repeat, rng):
    print(f"{'kernel':<16}{'n':>4}{'dim':>6}{'cython ms':>12}{'numpy ms':>12}{'ratio':>8}")
    for n in spins:
        basis = build_basis(n)
        d = basis.dim
        rt = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = rt + rt.conj().T
        lam = rng.normal(size=d)
        cases = {
            "phase_rotate": lambda m: m.phase_rotate(rt, lam, lam, 1.3),
            "coherence_sums": lambda m: m.coherence_sums(rho, basis.popcount, n),
        }
        for name, call in cases.items():
            fast = best_of(lambda: call(_compiled), repeat) * 1e3
            slow = best_of(lambda: call(_kernels_py), repeat) * 1e3
            print(f"{name:<16}{n:>4}{d:>6}{fast:>12.3f}{slow:>12.3f}{slow / fast:>8.2f}")


def bench_scan(spins, points, rng):
    print(f"\n{'scan':<16}{'n':>4}{'points':>8}{'cython s':>11}{'numpy s':>11}{'ratio':>8}")
    for n in spins:
        basis = build_basis(n)
        prep = prepare(propagator_for(ring_couplings(n), blocked=True), equilibrium_state(basis))
        times = np.linspace(0.01, 10.0, points)

        def scan():
            for t in times:
                mq_spectrum(evolve_prepared(prep, t), basis)

        out = []
        for mod in (_compiled, _kernels_py):
            with backend(mod):
                out.append(best_of(scan, 1))
        print(f"{'ring':<16}{n:>4}{points:>8}{out[0]:>11.3f}{out[1]:>11.3f}{out[1] / out[0]:>8.2f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--spins", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--points", type=int, default=50)
    args = ap.parse_args()
    if _compiled is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    rng = np.random.default_rng(0)
    bench_kernels(args.spins, args.repeat, rng)
    bench_scan(args.spins, args.points, rng)


if __name__ == "__main__":
    main()
