# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled radial quadrature kernel.

Mirror of ``heliobubble._kernels_py``; see that module for the packed
potential-term layout.
"""

from libc.math cimport exp, fabs, fmin, fmax, pow, isfinite, NAN, INFINITY
from libc.stdlib cimport malloc, free

DEF KINETIC_GUARD = 1e-8
DEF SERIES_CUTOFF = 0.05
DEF EPMACH = 2.220446049250313e-16
DEF UFLOW = 2.2250738585072014e-308

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
cdef double SERIES[9]

XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

from math import factorial as _factorial
for _i, _n in enumerate(range(10, 1, -1)):
    SERIES[_i] = (-1) ** _n * (_n - 1) / <double>_factorial(_n)

MODE_INTERACTION = 0
MODE_KINETIC = 1
OK = 0
LIMIT_REACHED = 1
BAD_INTEGRAND = 3


cdef struct Ctx:
    int mode
    double r0
    double alpha
    double rho0
    const double *terms
    Py_ssize_t nterms
    const double *knots
    const double *coefs
    Py_ssize_t ncoef


cdef inline double _shape(double s) noexcept nogil:
    cdef double poly = 0.0
    cdef int i
    if s < SERIES_CUTOFF:
        for i in range(9):
            poly = poly * s + SERIES[i]
        return poly * s * s
    return 1.0 - (1.0 + s) * exp(-s)


cdef double _spline(double r, Py_ssize_t start, Py_ssize_t n, double vlast, Ctx *ctx) noexcept nogil:
    cdef Py_ssize_t lo = start, last = start + n - 1, hi, mid
    cdef double dx, q, q3
    cdef const double *k = ctx.knots
    cdef Py_ssize_t nc = ctx.ncoef
    if r < k[lo]:
        return NAN
    if r >= k[last]:
        q = k[last] / r
        q3 = q * q * q
        return vlast * q3 * q3
    hi = last
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if k[mid] <= r:
            lo = mid
        else:
            hi = mid
    dx = r - k[lo]
    return ((ctx.coefs[lo] * dx + ctx.coefs[nc + lo]) * dx + ctx.coefs[2 * nc + lo]) * dx + ctx.coefs[3 * nc + lo]


cdef double _potential(double r, Ctx *ctx) noexcept nogil:
    cdef double total = 0.0, v, e, q, q3, x
    cdef Py_ssize_t i
    cdef const double *row
    for i in range(ctx.nterms):
        row = ctx.terms + 6 * i
        if row[1] == 0.0 or r > row[5]:
            continue
        if row[0] == 0.0:
            e = exp(-row[4] * (r - row[3]))
            v = row[2] * (e * e - 2.0 * e)
        elif row[0] == 1.0:
            q = row[3] / r
            q3 = q * q * q
            x = q3 * q3
            v = row[2] * (x * x - 2.0 * x)
        else:
            v = _spline(r, <Py_ssize_t>row[2], <Py_ssize_t>row[3], row[4], ctx)
        total += row[1] * v
    return total


cdef inline double _integrand(double r, Ctx *ctx) noexcept nogil:
    cdef double s = ctx.alpha * (r - ctx.r0), e
    if s < 0.0:
        return 0.0
    if ctx.mode == 1:
        if s < KINETIC_GUARD:
            return 2.0 * ctx.rho0 * ctx.alpha * ctx.alpha * r * r
        e = exp(-s)
        return ctx.rho0 * ctx.alpha * ctx.alpha * s * s * e * e / _shape(s) * r * r
    return _potential(r, ctx) * ctx.rho0 * _shape(s) * r * r


cdef void _gk15(double a, double b, Ctx *ctx, double *result, double *abserr) noexcept nogil:
    cdef double centr = 0.5 * (a + b), hlgth = 0.5 * (b - a)
    cdef double fc, resg, resk, reskh, resabs, resasc, absc, f1, f2, err
    cdef double fv1[7]
    cdef double fv2[7]
    cdef int j
    fc = _integrand(centr, ctx)
    resg = fc * WG[3]
    resk = fc * WGK[7]
    for j in range(7):
        absc = hlgth * XGK[j]
        f1 = _integrand(centr - absc, ctx)
        f2 = _integrand(centr + absc, ctx)
        fv1[j] = f1
        fv2[j] = f2
        resk += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            resg += WG[j // 2] * (f1 + f2)
    reskh = 0.5 * resk
    resabs = WGK[7] * fabs(fc)
    resasc = WGK[7] * fabs(fc - reskh)
    for j in range(7):
        resabs += WGK[j] * (fabs(fv1[j]) + fabs(fv2[j]))
        resasc += WGK[j] * (fabs(fv1[j] - reskh) + fabs(fv2[j] - reskh))
    result[0] = resk * hlgth
    resabs *= fabs(hlgth)
    resasc *= fabs(hlgth)
    err = fabs((resk - resg) * hlgth)
    if resasc != 0.0 and err != 0.0:
        err = resasc * fmin(1.0, pow(200.0 * err / resasc, 1.5))
    if resabs > UFLOW / (50.0 * EPMACH):
        err = fmax(EPMACH * 50.0 * resabs, err)
    abserr[0] = err


def radial_integral(int mode, double r0, double alpha, double rho0,
                    const double[:, ::1] terms, const double[::1] knots,
                    const double[:, ::1] coefs, double lower, double upper,
                    double epsrel, double epsabs, int limit):
    """Adaptive Gauss-Kronrod (7/15) integral of the selected radial integrand.

    Returns ``(value, abserr, n_evaluations, ier)``.
    """
    cdef Ctx ctx
    cdef double dummy = 0.0
    cdef double *ia
    cdef double *ib
    cdef double *ir
    cdef double *ie
    cdef Py_ssize_t n = 1, i, imax
    cdef double total, errsum, mid, r1, e1, r2, e2, emax
    cdef long neval = 15
    cdef int ier = 0
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if terms.shape[0] > 0 and terms.shape[1] != 6:
        raise ValueError("terms must have 6 columns")
    ctx.mode = mode
    ctx.r0 = r0
    ctx.alpha = alpha
    ctx.rho0 = rho0
    ctx.nterms = terms.shape[0]
    ctx.terms = &terms[0, 0] if terms.shape[0] > 0 else &dummy
    ctx.knots = &knots[0] if knots.shape[0] > 0 else &dummy
    ctx.ncoef = coefs.shape[1]
    ctx.coefs = &coefs[0, 0] if coefs.shape[0] > 0 and coefs.shape[1] > 0 else &dummy

    ia = <double *>malloc(limit * sizeof(double))
    ib = <double *>malloc(limit * sizeof(double))
    ir = <double *>malloc(limit * sizeof(double))
    ie = <double *>malloc(limit * sizeof(double))
    if ia == NULL or ib == NULL or ir == NULL or ie == NULL:
        free(ia); free(ib); free(ir); free(ie)
        raise MemoryError()
    try:
        with nogil:
            ia[0] = lower
            ib[0] = upper
            _gk15(lower, upper, &ctx, &ir[0], &ie[0])
            total = ir[0]
            errsum = ie[0]
            if not (isfinite(total) and isfinite(errsum)):
                ier = 3
            while ier == 0 and errsum > fmax(epsabs, epsrel * fabs(total)):
                if n >= limit:
                    ier = 1
                    break
                imax = 0
                emax = ie[0]
                for i in range(1, n):
                    if ie[i] > emax:
                        emax = ie[i]
                        imax = i
                mid = 0.5 * (ia[imax] + ib[imax])
                _gk15(ia[imax], mid, &ctx, &r1, &e1)
                _gk15(mid, ib[imax], &ctx, &r2, &e2)
                neval += 30
                if not (isfinite(r1) and isfinite(r2)):
                    total = r1 + r2
                    errsum = INFINITY
                    ier = 3
                    break
                ia[n] = mid
                ib[n] = ib[imax]
                ir[n] = r2
                ie[n] = e2
                ib[imax] = mid
                ir[imax] = r1
                ie[imax] = e1
                n += 1
                total = 0.0
                errsum = 0.0
                for i in range(n):
                    total += ir[i]
                    errsum += ie[i]
        return total, errsum, neval, ier
    finally:
        free(ia); free(ib); free(ir); free(ie)


def potential_sum(double r, const double[:, ::1] terms, const double[::1] knots,
                  const double[:, ::1] coefs):
    """Weighted sum of the packed potential terms at ``r``."""
    cdef Ctx ctx
    cdef double dummy = 0.0
    if terms.shape[0] > 0 and terms.shape[1] != 6:
        raise ValueError("terms must have 6 columns")
    ctx.mode = 0
    ctx.r0 = 0.0
    ctx.alpha = 1.0
    ctx.rho0 = 1.0
    ctx.nterms = terms.shape[0]
    ctx.terms = &terms[0, 0] if terms.shape[0] > 0 else &dummy
    ctx.knots = &knots[0] if knots.shape[0] > 0 else &dummy
    ctx.ncoef = coefs.shape[1]
    ctx.coefs = &coefs[0, 0] if coefs.shape[0] > 0 and coefs.shape[1] > 0 else &dummy
    return _potential(r, &ctx)
