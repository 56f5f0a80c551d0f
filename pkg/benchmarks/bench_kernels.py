"""Compare the compiled and pure-Python quadrature kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--scan]

Per-integral timings call both backends directly on the same inputs and
check that they agree. ``--scan`` also times a 13-point pressure scan
end to end, once per backend, in a fresh interpreter each (the backend
is fixed at import through HELIOBUBBLE_PURE_PYTHON).
"""

import argparse
import os
import subprocess
import sys
import timeit

from heliobubble import _kernels_py
from heliobubble.equilibrium import DEFAULT_OPTIONS
from heliobubble.potentials import CALIBRATED_POTENTIALS, pack_terms
from heliobubble.quadrature import MODE_INTERACTION, MODE_KINETIC, QuadratureSpec, radial_integral

try:
    from heliobubble import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

SCAN = ("from heliobubble.equilibrium import pressure_scan; "
        "from heliobubble.potentials import CALIBRATED_POTENTIALS as P; "
        "from heliobubble.constants import DEFAULT_CONSTANTS as C; "
        "import numpy as np; pressure_scan(P, np.linspace(0, 24, 13), C.sigma_default)")


def cases():
    r0, alpha, rho0 = 15.8, DEFAULT_OPTIONS.alpha, DEFAULT_OPTIONS.rho0
    quad = QuadratureSpec()
    pots = CALIBRATED_POTENTIALS
    s_terms = pack_terms([(pots.v_s, 1.0)])
    p_terms = pack_terms([(pots.v_p_sigma, 1.0 / 3.0), (pots.v_p_pi, 2.0 / 3.0)])
    upper = r0 + 60.0
    return {
        "kinetic": (MODE_KINETIC, r0, alpha, rho0, upper, quad, None, None, None),
        "interaction S": (MODE_INTERACTION, r0, alpha, rho0, upper, quad, *s_terms),
        "interaction P": (MODE_INTERACTION, r0, alpha, rho0, upper, quad, *p_terms),
    }


def time_call(args, backend, repeat):
    timer = timeit.Timer(lambda: radial_integral(*args, backend=backend))
    number, _ = timer.autorange()
    best = min(timer.repeat(repeat, number)) / number
    return best, radial_integral(*args, backend=backend).value


def time_scan(pure):
    env = dict(os.environ)
    env.pop("HELIOBUBBLE_PURE_PYTHON", None)
    if pure:
        env["HELIOBUBBLE_PURE_PYTHON"] = "1"
    code = f"import time; t = time.perf_counter(); {SCAN}; print(time.perf_counter() - t)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--scan", action="store_true", help="also time a full pressure scan per backend")
    args = parser.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not built; only the Python kernel is available")
    print(f"{'integral':16s} {'python [us]':>12s} {'cython [us]':>12s} {'speedup':>8s} {'rel diff':>9s}")
    for name, call in cases().items():
        t_py, v_py = time_call(call, _kernels_py, args.repeat)
        if _kernels_c is None:
            print(f"{name:16s} {t_py * 1e6:12.1f}")
            continue
        t_c, v_c = time_call(call, _kernels_c, args.repeat)
        diff = abs(v_c - v_py) / abs(v_py)
        print(f"{name:16s} {t_py * 1e6:12.1f} {t_c * 1e6:12.1f} {t_py / t_c:8.1f} {diff:9.1e}")
    if args.scan:
        t_py = time_scan(True)
        line = f"13-point scan     python {t_py:.2f} s"
        if _kernels_c is not None:
            t_c = time_scan(False)
            line += f", cython {t_c:.2f} s, speedup {t_py / t_c:.1f}"
        print(line)


if __name__ == "__main__":
    main()
