"""Pure-Python radial quadrature kernel.

Same algorithm and call signature as the compiled ``_kernels`` extension;
used when the extension is not built or ``HELIOBUBBLE_PURE_PYTHON`` is set.

Potential terms are packed rows ``(kind, weight, p0, p1, p2, cutoff)``:

    kind 0  Morse          p0=D_e   p1=r_e      p2=a
    kind 1  Lennard-Jones  p0=eps   p1=r_m      p2 unused
    kind 2  cubic spline   p0=first knot index  p1=knot count  p2=value at last knot

Spline coefficients share the knot indexing (column i covers
[knots[i], knots[i+1]]). Past the last knot a spline continues as
V_last * (r_last / r)**6; every term is zero beyond its cutoff.
"""

import heapq
import math

MODE_INTERACTION = 0
MODE_KINETIC = 1

# ier codes
OK = 0
LIMIT_REACHED = 1
BAD_INTEGRAND = 3

_KINETIC_GUARD = 1e-8
_SERIES_CUTOFF = 0.05
_EPMACH = 2.220446049250313e-16
_UFLOW = 2.2250738585072014e-308

_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)
_SERIES = tuple((-1) ** n * (n - 1) / math.factorial(n) for n in range(10, 1, -1))


def _shape(s):
    if s < _SERIES_CUTOFF:
        poly = 0.0
        for c in _SERIES:
            poly = poly * s + c
        return poly * s * s
    return 1.0 - (1.0 + s) * math.exp(-s)


def _spline(r, start, n, vlast, knots, coefs):
    lo = start
    last = start + n - 1
    if r < knots[lo]:
        return math.nan
    if r >= knots[last]:
        q = knots[last] / r
        q3 = q * q * q
        return vlast * q3 * q3
    hi = last
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if knots[mid] <= r:
            lo = mid
        else:
            hi = mid
    dx = r - knots[lo]
    return ((coefs[0][lo] * dx + coefs[1][lo]) * dx + coefs[2][lo]) * dx + coefs[3][lo]


def potential_sum(r, terms, knots, coefs):
    total = 0.0
    for kind, weight, p0, p1, p2, cutoff in terms:
        if weight == 0.0 or r > cutoff:
            continue
        if kind == 0:
            e = math.exp(-p2 * (r - p1))
            v = p0 * (e * e - 2.0 * e)
        elif kind == 1:
            q = p1 / r
            q3 = q * q * q
            x = q3 * q3
            v = p0 * (x * x - 2.0 * x)
        else:
            v = _spline(r, int(p0), int(p1), p2, knots, coefs)
        total += weight * v
    return total


def _integrand(mode, r, r0, alpha, rho0, terms, knots, coefs):
    s = alpha * (r - r0)
    if s < 0.0:
        return 0.0
    if mode == MODE_KINETIC:
        if s < _KINETIC_GUARD:
            return 2.0 * rho0 * alpha * alpha * r * r
        e = math.exp(-s)
        return rho0 * alpha * alpha * s * s * e * e / _shape(s) * r * r
    return potential_sum(r, terms, knots, coefs) * rho0 * _shape(s) * r * r


def _gk15(mode, a, b, r0, alpha, rho0, terms, knots, coefs):
    centr = 0.5 * (a + b)
    hlgth = 0.5 * (b - a)
    fc = _integrand(mode, centr, r0, alpha, rho0, terms, knots, coefs)
    resg = fc * _WG[3]
    resk = fc * _WGK[7]
    fv1 = [0.0] * 7
    fv2 = [0.0] * 7
    for j in range(7):
        absc = hlgth * _XGK[j]
        f1 = _integrand(mode, centr - absc, r0, alpha, rho0, terms, knots, coefs)
        f2 = _integrand(mode, centr + absc, r0, alpha, rho0, terms, knots, coefs)
        fv1[j] = f1
        fv2[j] = f2
        resk += _WGK[j] * (f1 + f2)
        if j % 2 == 1:
            resg += _WG[j // 2] * (f1 + f2)
    reskh = 0.5 * resk
    resabs = _WGK[7] * abs(fc)
    resasc = _WGK[7] * abs(fc - reskh)
    for j in range(7):
        resabs += _WGK[j] * (abs(fv1[j]) + abs(fv2[j]))
        resasc += _WGK[j] * (abs(fv1[j] - reskh) + abs(fv2[j] - reskh))
    result = resk * hlgth
    resabs *= abs(hlgth)
    resasc *= abs(hlgth)
    abserr = abs((resk - resg) * hlgth)
    if resasc != 0.0 and abserr != 0.0:
        abserr = resasc * min(1.0, (200.0 * abserr / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPMACH):
        abserr = max(_EPMACH * 50.0 * resabs, abserr)
    return result, abserr


def radial_integral(mode, r0, alpha, rho0, terms, knots, coefs, lower, upper, epsrel, epsabs, limit):
    """Adaptive Gauss-Kronrod (7/15) integral of the selected radial integrand.

    Returns ``(value, abserr, n_evaluations, ier)``.
    """
    terms = [tuple(float(x) for x in row) for row in terms]
    knots = [float(x) for x in knots]
    coefs = [[float(x) for x in row] for row in coefs]
    result, abserr = _gk15(mode, lower, upper, r0, alpha, rho0, terms, knots, coefs)
    neval = 15
    if not (math.isfinite(result) and math.isfinite(abserr)):
        return result, abserr, neval, BAD_INTEGRAND
    # max-heap on error: (-err, a, b, value)
    heap = [(-abserr, lower, upper, result)]
    total, errsum = result, abserr
    ier = OK
    while errsum > max(epsabs, epsrel * abs(total)):
        if len(heap) >= limit:
            ier = LIMIT_REACHED
            break
        neg_err, a, b, value = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        r1, e1 = _gk15(mode, a, mid, r0, alpha, rho0, terms, knots, coefs)
        r2, e2 = _gk15(mode, mid, b, r0, alpha, rho0, terms, knots, coefs)
        neval += 30
        if not (math.isfinite(r1) and math.isfinite(r2)):
            return r1 + r2, math.inf, neval, BAD_INTEGRAND
        heapq.heappush(heap, (-e1, a, mid, r1))
        heapq.heappush(heap, (-e2, mid, b, r2))
        # re-sum instead of updating in place to keep round-off from drifting
        total = math.fsum(item[3] for item in heap)
        errsum = math.fsum(-item[0] for item in heap)
    return total, errsum, neval, ier
