"""Quadrature oracle for the Moshinsky propagation kernel.

Independent of the Faddeeva-based evaluator: M(x, q, t) is computed as
the shutter integral of the free propagator over the initial half-line,

    M(x, q, t) = integral_{-inf}^{0} K(x - x', t) e^{i q x'} dx',
    K(u, t)    = sqrt(m / (2 pi i hbar t)) exp(i m u^2 / (2 hbar t)),

which is the defining initial-value problem for a cut-off plane wave.
The contour x' = -s e^{i a} (0 < a < pi/2) turns the Fresnel oscillation
into Gaussian decay.  For complex q the factor e^{i q x'} can grow along
the rotated ray before the Gaussian wins; the rotation angle is chosen
per point to minimise that growth and the transient peak is absorbed
into extra working digits, so cancellation never eats the result.
"""

import math

import mpmath as mp

# Default unit system: hbar in eV ps, hbar/m in A^2/ps (electron mass).
HBAR_EV_PS = mp.mpf("6.582119569e-4")
HBAR_OVER_M = mp.mpf("1.1576764e4")

_CANDIDATE_ROTATIONS = (0.10, math.pi / 8, math.pi / 4, math.pi / 2 - 0.10)


def _growth_penalty(q, t, alpha, hom):
    """Peak of the integrand's log-magnitude along the rotated ray.

    The exponent is  g*s - s^2 sin(2a)/(2 hom t)  with g = Im(q e^{ia});
    its maximum over s >= 0 is g^2 hom t / (2 sin 2a) when g > 0.
    """
    g = (q * complex(math.cos(alpha), math.sin(alpha))).imag
    if g <= 0:
        return 0.0
    return g * g * hom * t / (2.0 * math.sin(2.0 * alpha))


def moshinsky_quadrature(x, q, t, dps=40):
    """M(x, q, t) from the propagator integral, to ~dps digits."""
    qc = complex(q)
    hom = float(HBAR_OVER_M)
    alpha = min(_CANDIDATE_ROTATIONS,
                key=lambda a: _growth_penalty(qc, float(t), a, hom))
    guard = int(_growth_penalty(qc, float(t), alpha, hom) / math.log(10.0)) + 20
    with mp.workdps(dps + guard):
        x = mp.mpf(x)
        q = mp.mpc(q)
        t = mp.mpf(t)
        hom_mp = HBAR_OVER_M
        pref = mp.sqrt(1 / (2 * mp.pi * hom_mp * t)) * mp.exp(-1j * mp.pi / 4)
        rot = mp.exp(1j * mp.mpf(alpha))

        def integrand(s):
            xp = -s * rot  # point on the rotated half-line
            u = x - xp
            return rot * pref * mp.exp(1j * u * u / (2 * hom_mp * t)) * mp.exp(1j * q * xp)

        return mp.mpc(mp.quad(integrand, [0, mp.inf]))
