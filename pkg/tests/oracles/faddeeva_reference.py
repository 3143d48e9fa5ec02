"""Extended-precision reference for the Faddeeva function w(z).

This is the independent oracle the fast implementation is checked against.
It deliberately avoids scipy: the upper half-plane is evaluated either by
the Maclaurin series

    w(z) = sum_n (iz)^n / Gamma(n/2 + 1)

or, for large |z|, by the Laplace continued fraction

    w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))

both carried out in mpmath arbitrary-precision arithmetic.  The lower
half-plane uses the exact reflection w(z) = 2 exp(-z^2) - w(-z).

The series needs working precision well beyond the target because its
terms grow to ~exp(|z|^2) before decaying; the precision budget below
accounts for that.
"""

import mpmath as mp

# |z| above which the continued fraction is used instead of the series.
_SERIES_CF_SPLIT = 9.0
_CF_TERMS = 80


def _w_series(z, eps):
    """Maclaurin series of w, summed until terms stay below eps."""
    iz = 1j * z
    term_pow = mp.mpc(1)  # (iz)^n
    total = mp.mpc(0)
    n = 0
    quiet = 0
    while quiet < 8:
        total += term_pow / mp.gamma(mp.mpf(n) / 2 + 1)
        term_pow *= iz
        n += 1
        if abs(term_pow) / abs(mp.gamma(mp.mpf(n) / 2 + 1)) < eps:
            quiet += 1
        else:
            quiet = 0
        if n > 20000:
            raise RuntimeError("faddeeva series did not converge")
    return total


def _w_continued_fraction(z, terms=_CF_TERMS):
    """Laplace continued fraction, valid away from the real axis growth
    region; used here only for |z| >= _SERIES_CF_SPLIT with Im z >= 0."""
    f = mp.mpc(0)
    for n in range(terms, 0, -1):
        f = (mp.mpf(n) / 2) / (z - f)
    return 1j / mp.sqrt(mp.pi) / (z - f)


def faddeeva_reference(z, dps=50):
    """w(z) to `dps` significant digits, as an mpmath complex number.

    Any finite complex z is accepted; results whose magnitude exceeds
    double range are still returned exactly (callers decide what to do).
    """
    z = mp.mpc(z)
    # Series terms peak near exp(|z|^2); add matching guard digits.
    guard = int(0.435 * abs(z) ** 2) + 30
    with mp.workdps(dps + guard):
        if mp.im(z) >= 0:
            if abs(z) <= _SERIES_CF_SPLIT:
                w = _w_series(z, mp.mpf(10) ** (-(dps + 10)))
            else:
                w = _w_continued_fraction(z)
        else:
            # Reflection into the upper half-plane.
            zr = -z
            if abs(zr) <= _SERIES_CF_SPLIT:
                wr = _w_series(zr, mp.mpf(10) ** (-(dps + 10)))
            else:
                wr = _w_continued_fraction(zr)
            w = 2 * mp.exp(-z * z) - wr
        return mp.mpc(w)


def faddeeva_erfc_crosscheck(z, dps=50):
    """Same quantity via mpmath's own erfc; used only to cross-validate
    the series/continued-fraction oracle while generating fixtures."""
    z = mp.mpc(z)
    guard = int(0.435 * abs(z) ** 2) + 30
    with mp.workdps(dps + guard):
        return mp.mpc(mp.exp(-z * z) * mp.erfc(-1j * z))
