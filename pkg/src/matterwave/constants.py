"""Unit system and particle constants.

Everything in the package works in a fixed unit system: energies in eV,
lengths in Angstrom, times in picoseconds, wavenumbers in 1/Angstrom.
Only two constants enter any formula: hbar (eV ps) and hbar/m (A^2/ps);
the frequently used hbar^2/2m (eV A^2) is derived from them.

Defaults are CODATA values for the electron:

    hbar      = 6.582119569e-4 eV ps
    hbar/m_e  = 1.1576764e4   A^2/ps   (so hbar^2/2m_e = 3.80998 eV A^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

HBAR_EV_PS = 6.582119569e-4
HBAR_OVER_ME = 1.1576764e4


@dataclass(frozen=True)
class PhysicsConstants:
    """Kinematic constants of the propagating particle.

    Parameters
    ----------
    hbar : float
        Reduced Planck constant in eV ps.
    hbar_over_m : float
        hbar/m in A^2/ps; fixes the particle mass.
    hbar2_over_2m : float, optional
        Normally derived as hbar * hbar_over_m / 2.  Passing an explicit
        inconsistent value is supported only as a fault-injection hook for
        the validation suite.
    """

    hbar: float = HBAR_EV_PS
    hbar_over_m: float = HBAR_OVER_ME
    hbar2_over_2m: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.hbar > 0 and self.hbar_over_m > 0):
            raise ValueError("constants must be positive")
        if self.hbar2_over_2m is None:
            object.__setattr__(self, "hbar2_over_2m", self.hbar * self.hbar_over_m / 2.0)
        elif not self.hbar2_over_2m > 0:
            raise ValueError("constants must be positive")

    @classmethod
    def for_mass_ratio(cls, mass_ratio: float, hbar: float = HBAR_EV_PS) -> "PhysicsConstants":
        """Constants for a particle of mass ``mass_ratio`` electron masses."""
        if not mass_ratio > 0:
            raise ValueError("mass_ratio must be positive")
        return cls(hbar=hbar, hbar_over_m=HBAR_OVER_ME / mass_ratio)

    def velocity(self, k):
        """Group velocity hbar k / m in A/ps."""
        return self.hbar_over_m * k

    def energy(self, k):
        """Kinetic energy hbar^2 k^2 / 2m in eV."""
        return self.hbar2_over_2m * k * k

    def wavenumber(self, energy: float) -> float:
        """Positive k with hbar^2 k^2 / 2m = energy."""
        if energy < 0:
            raise ValueError("energy must be non-negative")
        return math.sqrt(energy / self.hbar2_over_2m)


DEFAULT_CONSTANTS = PhysicsConstants()
