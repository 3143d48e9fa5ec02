"""Faddeeva function and the Moshinsky propagation kernel.

The transient solution of the quantum-shutter problem is assembled from
Moshinsky functions

    M(x, q, t) = (1/2) exp(i m x^2 / 2 hbar t) w(i y_q),
    y_q        = e^{-i pi/4} (x - hbar q t / m) / sqrt(2 hbar t / m),

where w(z) = exp(-z^2) erfc(-iz) is the Faddeeva function and q may be
any complex wavenumber (real momenta, the bound-state pole i*lambda_tilde,
or resonance poles in the lower half-plane).

Stability notes
---------------
w is bounded on the closed upper half-plane; the lower half-plane is
reached through the reflection w(z) = 2 exp(-z^2) - w(-z), which grows
like exp(|Im z|^2 - |Re z|^2).  The production evaluator (scipy's wofz,
i.e. the MIT Faddeeva routine) applies that reflection internally, so the
only remaining failure mode is genuine double-precision overflow of the
function value itself; both entry points detect that regime from the
exponent bookkeeping and raise instead of letting an Inf escape.
"""

from __future__ import annotations

import numpy as np
from scipy.special import wofz

from .constants import DEFAULT_CONSTANTS, PhysicsConstants

# log of the largest double, less headroom for the 1/2 prefactor
_EXP_OVERFLOW = 708.0

_SQRT_PI = np.sqrt(np.pi)
_EM_I_PI_4 = np.exp(-0.25j * np.pi)  # e^{-i pi/4}


def faddeeva(z):
    """Faddeeva function w(z) = exp(-z^2) erfc(-iz) for complex z.

    Accepts scalars or arrays.  NaN input is rejected; inputs for which
    w(z) overflows double precision (deep in the lower half-plane, where
    w ~ 2 exp(-z^2)) raise OverflowError rather than returning Inf.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.isnan(z.real) | np.isnan(z.imag)):
        raise ValueError("faddeeva: NaN input")
    grow = z.imag**2 - z.real**2  # log|exp(-z^2)| where the reflection applies
    if np.any((z.imag < 0) & (grow > _EXP_OVERFLOW)):
        raise OverflowError("faddeeva: w(z) exceeds double-precision range")
    out = wofz(z)
    return out if out.shape else complex(out)


def moshinsky_arg(x, q, t, constants: PhysicsConstants = DEFAULT_CONSTANTS):
    """Scaled argument y_q = e^{-i pi/4} (x - hbar q t/m)/sqrt(2 hbar t/m).

    Requires t > 0.  At x = 0 this reduces to
    y0_q = -e^{-i pi/4} q sqrt(hbar t / 2m).
    """
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=complex)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("moshinsky_arg: t must be positive")
    hom = constants.hbar_over_m
    out = _EM_I_PI_4 * (x - hom * q * t) / np.sqrt(2.0 * hom * t)
    return out if out.shape else complex(out)


def _front_phase(x, t, constants):
    """exp(i m x^2 / 2 hbar t), the free-propagation front phase."""
    return np.exp(1j * x * x / (2.0 * constants.hbar_over_m * t))


def moshinsky(x, q, t, constants: PhysicsConstants = DEFAULT_CONSTANTS):
    """Moshinsky function M(x, q, t) for real x, t > 0 and complex q.

    Values that genuinely exceed double range (possible only for q in the
    open first quadrant, where M grows like exp(Im q (v t - x))) raise
    OverflowError.
    """
    y = moshinsky_arg(x, q, t, constants)
    y = np.asarray(y, dtype=complex)
    if np.any((y.real < 0) & ((y * y).real > _EXP_OVERFLOW)):
        raise OverflowError("moshinsky: |M| exceeds double-precision range")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    out = 0.5 * _front_phase(x, t, constants) * wofz(1j * y)
    return out if out.shape else complex(out)


def moshinsky_reflected(x, q, t, constants: PhysicsConstants = DEFAULT_CONSTANTS):
    """M(x, q, t) through the reflection identity

        M(x, q, t) = exp(i q x - i hbar q^2 t / 2m) - M(-x, -q, t),

    the x != 0 generalisation of the half-value sum rule at the shutter.
    Used to cross-validate the direct evaluator; both sides are checked
    against propagator-integral quadrature in the test suite.
    """
    q = np.asarray(q, dtype=complex)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    hom = constants.hbar_over_m
    exponent = 1j * q * x - 0.5j * hom * q * q * t
    if np.any(exponent.real > _EXP_OVERFLOW):
        raise OverflowError("moshinsky_reflected: |M| exceeds double-precision range")
    out = np.exp(exponent) - moshinsky(-x, -q, t, constants)
    return out if out.shape else complex(out)


def moshinsky_asymptotic(x, q, t, constants: PhysicsConstants = DEFAULT_CONSTANTS,
                         min_abs_y: float = 5.0):
    """Large-|y| asymptotic form of M, for validating the exact evaluator.

    For Re y_q > 0 (front not yet arrived),

        M ~ exp(i m x^2/2 hbar t) / (2 sqrt(pi) y) * (1 - 1/(2 y^2)),

    (the w series in 1/(2z^2) alternates once z^2 = -y^2) and for
    Re y_q < 0 the exponential branch exp(y^2) is added, which dominates
    wherever Re(y^2) > 0.  Never substituted for the exact evaluator;
    raises if |y| is below ``min_abs_y``.
    """
    y = np.asarray(moshinsky_arg(x, q, t, constants), dtype=complex)
    if np.any(np.abs(y) < min_abs_y):
        raise ValueError(f"moshinsky_asymptotic requires |y| >= {min_abs_y}")
    y2 = y * y
    if np.any((y.real < 0) & (y2.real > _EXP_OVERFLOW)):
        raise OverflowError("moshinsky_asymptotic: exponential branch overflows")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    phase = np.broadcast_to(_front_phase(x, t, constants), y.shape)
    out = phase / (2.0 * _SQRT_PI * y) * (1.0 - 0.5 / y2)
    mask = y.real < 0
    if np.any(mask):
        out = out + np.where(mask, np.exp(np.where(mask, y2, 0.0)), 0.0) * phase
    return out if out.shape else complex(out)
