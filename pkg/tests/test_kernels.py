import math
import os
import subprocess
import sys

import numpy as np
import pytest

import oracles
from heliobubble import _kernels_py, quadrature
from heliobubble.potentials import LennardJones, Morse, Tabulated, pack_terms
from heliobubble.quadrature import MODE_INTERACTION, MODE_KINETIC, QuadratureError, QuadratureSpec, radial_integral

try:
    from heliobubble import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

needs_ext = pytest.mark.skipif(_kernels_c is None, reason="compiled extension not built")

RHO0 = 0.0032518


def _mixed_terms():
    r = np.linspace(6.0, 30.0, 40)
    tab = Tabulated(tuple(r), tuple(-3e-5 * np.exp(-0.5 * (r - 10.0) ** 2 / 4.0) + 1e-3 * np.exp(-2 * (r - 6.0))))
    return pack_terms([(Morse(1e-4, 8.0, 0.9), 1.0), (LennardJones(5e-5, 11.0), 2.0), (tab, 0.5)])


@needs_ext
@pytest.mark.parametrize("r0", [6.5, 9.0, 14.0])
def test_backends_agree(r0):
    terms, knots, coefs = _mixed_terms()
    quad = QuadratureSpec()
    for mode, t, k, c in ((MODE_KINETIC, None, None, None), (MODE_INTERACTION, terms, knots, coefs)):
        py = radial_integral(mode, r0, 1.18, RHO0, r0 + 60, quad, t, k, c, backend=_kernels_py)
        cy = radial_integral(mode, r0, 1.18, RHO0, r0 + 60, quad, t, k, c, backend=_kernels_c)
        assert cy.value == pytest.approx(py.value, rel=1e-13)
        assert cy.evaluations == py.evaluations


@needs_ext
def test_potential_sum_agrees():
    terms, knots, coefs = _mixed_terms()
    for r in (6.0, 7.3, 12.0, 29.99, 45.0, 1e4):
        a = _kernels_py.potential_sum(r, terms, knots, coefs)
        b = _kernels_c.potential_sum(r, terms, knots, coefs)
        assert b == pytest.approx(a, rel=1e-14, abs=1e-300)


def test_python_kernel_matches_curves():
    r = np.linspace(6.0, 30.0, 40)
    tab = Tabulated(tuple(r), tuple(1e-4 * np.exp(-(r - 6.0))))
    m = Morse(1e-4, 8.0, 0.9)
    terms, knots, coefs = pack_terms([(m, 1.0), (tab, 3.0)])
    for x in (6.0, 8.0, 17.77, 31.0, 60.0):
        expected = m(x) + 3.0 * tab(x)
        assert _kernels_py.potential_sum(x, terms, knots, coefs) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_limit_reached_raises():
    with pytest.raises(QuadratureError, match="did not converge"):
        radial_integral(MODE_KINETIC, 5.0, 1.18, RHO0, 60.0, QuadratureSpec(relative_tolerance=1e-15, limit=2))


def test_empty_range():
    assert radial_integral(MODE_KINETIC, 5.0, 1.18, RHO0, 5.0).value == 0.0


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, HELIOBUBBLE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import heliobubble.quadrature as q; print(q.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert quadrature.BACKEND in ("python", "cython")


def test_kinetic_kernel_value():
    # raw kernel integral of (rho')^2/rho r^2 against the trapezoid oracle (m = 1, no prefactors)
    res = radial_integral(MODE_KINETIC, 0.0, 1.0, 1.0, 40.0)
    ref = oracles.kinetic_trapezoid(0.0, 1.0, 1.0, 1.0) * 8.0 / (4.0 * math.pi)
    assert res.value == pytest.approx(ref, rel=1e-8)
