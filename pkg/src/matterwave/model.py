"""Initial states, potentials and their boundary transforms.

The cut-off initial state released at t = 0 is

    psi(x, 0) = 2 sin(k x) cos(dk x)   for x <= 0,   0 for x > 0,

a superposition of momenta k+- = k +- dk with kinetic energies
E+- = hbar^2 k+-^2 / 2m.  Its boundary transform (the "Q-transform")

    Phi(0, k, Q) = i [ k-/((Q+k-)(Q-k-)) + k+/((Q+k+)(Q-k+)) ]

is a meromorphic function of Q whose simple poles and residues, together
with the resonance poles of the potential, fully determine the transmitted
time-dependent wavefunction.  This module holds the packet and potential
models, the Q-transforms with their pole/residue data, and the derived
Rabi/beat frequencies.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_CONSTANTS, PhysicsConstants

# Evaluating a meromorphic transform closer to a pole than this raises
# instead of returning a huge number that downstream sums would absorb.
POLE_PROXIMITY = 1e-12


class PoleError(ValueError):
    """Evaluation requested at (or numerically on top of) a simple pole."""


@dataclass(frozen=True)
class QTransformML:
    """Mittag-Leffler data of a Q-transform: simple poles and residues."""

    poles: tuple
    residues: tuple
    constant_term: complex = 0j

    def __post_init__(self):
        if len(self.poles) != len(self.residues):
            raise ValueError("poles and residues must pair up")
        poles = np.asarray(self.poles, dtype=complex)
        if len(poles) > 1:
            sep = np.abs(poles[:, None] - poles[None, :])
            sep[np.diag_indices_from(sep)] = np.inf
            if sep.min() < POLE_PROXIMITY:
                raise PoleError("duplicate Q-transform poles; only simple poles are supported")

    def pole_sum(self, Q):
        """Partial-fraction value sum_m alpha_m/(Q - kappa_m) + constant."""
        Q = np.asarray(Q, dtype=complex)
        total = np.full(Q.shape, self.constant_term, dtype=complex)
        for pole, res in zip(self.poles, self.residues):
            _guard_poles(Q, (pole,))
            total += res / (Q - pole)
        return total if total.shape else total[()]


def _guard_poles(Q, poles):
    Q = np.asarray(Q, dtype=complex)
    for pole in poles:
        if np.any(np.abs(Q - pole) < POLE_PROXIMITY):
            raise PoleError(f"Q-transform evaluated within {POLE_PROXIMITY} of pole {pole}")


def q_transform_plane(k: float, Q):
    """Boundary transform 1/(k - Q) of a cut-off plane wave e^{ikx}."""
    Q = np.asarray(Q, dtype=complex)
    _guard_poles(Q, (k,))
    out = 1.0 / (k - Q)
    return out if out.shape else out[()]


def plane_wave_q_poles(k: float) -> QTransformML:
    """Pole data of the plane-wave transform: one pole at k, residue -1."""
    return QTransformML(poles=(complex(k),), residues=(-1.0 + 0j,))


@dataclass(frozen=True)
class ModulatedPacket:
    """Phase-modulated cut-off wave 2 sin(kx) cos(dk x), x <= 0.

    Requires 0 <= dk <= k; dk = 0 is the unmodulated carrier and dk = k
    closes the slow channel (k- = 0).
    """

    k: float
    dk: float = 0.0
    constants: PhysicsConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not 0.0 <= self.dk <= self.k:
            raise ValueError("dk must satisfy 0 <= dk <= k")

    @classmethod
    def from_energy(cls, energy: float, dk: float = 0.0,
                    constants: PhysicsConstants = DEFAULT_CONSTANTS) -> "ModulatedPacket":
        return cls(k=constants.wavenumber(energy), dk=dk, constants=constants)

    @property
    def k_plus(self) -> float:
        return self.k + self.dk

    @property
    def k_minus(self) -> float:
        return self.k - self.dk

    @property
    def E_plus(self) -> float:
        return self.constants.energy(self.k_plus)

    @property
    def E_minus(self) -> float:
        return self.constants.energy(self.k_minus)

    @property
    def v_plus(self) -> float:
        return self.constants.velocity(self.k_plus)

    @property
    def v_minus(self) -> float:
        return self.constants.velocity(self.k_minus)

    @property
    def v_k(self) -> float:
        return self.constants.velocity(self.k)

    @property
    def big_omega(self) -> float:
        """Rabi/beat frequency Omega = (E+ - E-)/hbar in rad/ps."""
        return (self.E_plus - self.E_minus) / self.constants.hbar

    def q_transform(self, Q):
        """Boundary transform of the modulated packet at complex Q."""
        return q_transform_modulated(self, Q)

    def q_poles(self) -> QTransformML:
        """Pole/residue data of the packet's Q-transform.

        Residues are +-i/2 at +-k+ and +-k-.  The degenerate edges merge
        poles: dk = 0 doubles the residues at +-k, dk = k drops the k- = 0
        pair (its residues cancel).
        """
        if self.dk == 0.0:
            return QTransformML(poles=(complex(self.k), complex(-self.k)),
                                residues=(1j, -1j))
        if self.dk == self.k:
            return QTransformML(poles=(complex(self.k_plus), complex(-self.k_plus)),
                                residues=(0.5j, -0.5j))
        return QTransformML(
            poles=(complex(self.k_plus), complex(-self.k_plus),
                   complex(self.k_minus), complex(-self.k_minus)),
            residues=(0.5j, -0.5j, 0.5j, -0.5j),
        )


def q_transform_modulated(packet: ModulatedPacket, Q):
    """i [ k-/((Q+k-)(Q-k-)) + k+/((Q+k+)(Q-k+)) ] at complex Q."""
    Q = np.asarray(Q, dtype=complex)
    kp, km = packet.k_plus, packet.k_minus
    poles = (kp, -kp) if km == 0.0 else (kp, -kp, km, -km)
    _guard_poles(Q, poles)
    out = 1j * (km / ((Q + km) * (Q - km)) + kp / ((Q + kp) * (Q - kp)))
    return out if out.shape else out[()]


@dataclass(frozen=True)
class DeltaWell:
    """Attractive Dirac delta potential V(x) = -lam * delta(x), lam > 0.

    Carries a single bound state at wavenumber i*lambda_tilde with energy
    E_b = -hbar^2 lambda_tilde^2 / 2m, where lambda_tilde = m lam / hbar^2.
    """

    lam: float
    constants: PhysicsConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("delta-well strength must be positive")

    @property
    def lambda_tilde(self) -> float:
        return self.lam / (2.0 * self.constants.hbar2_over_2m)

    @property
    def E_b(self) -> float:
        lt = self.lambda_tilde
        return -self.constants.hbar2_over_2m * lt * lt

    @property
    def bound_pole(self) -> complex:
        return 1j * self.lambda_tilde

    def transmission(self, q):
        """Stationary transmission amplitude t(q) = q/(q - i lambda_tilde).

        Accepts complex q; the time-dependent solution needs t(-k+-).
        """
        q = np.asarray(q, dtype=complex)
        pole = self.bound_pole
        if np.any(np.abs(q - pole) < POLE_PROXIMITY):
            raise PoleError("transmission amplitude evaluated at the bound-state pole")
        out = q / (q - pole)
        return out if out.shape else out[()]

    def resonance_data(self) -> "ResonanceData":
        """Zero-range resonance set: the single self-paired bound pole.

        In the L -> 0 limit the state weight is u^2(0) -> lambda_tilde,
        so t_n = lambda_tilde.
        """
        u = math.sqrt(self.lambda_tilde)
        return ResonanceData(L=0.0, entries=((self.bound_pole, u, u),))


def transmission_delta(well: DeltaWell, q):
    """Module-level alias of :meth:`DeltaWell.transmission`."""
    return well.transmission(q)


_PAIR_TOL = 1e-9  # relative tolerance for the k_{-n} = -k_n* pairing check


@dataclass(frozen=True)
class ResonanceData:
    """Resonance (quasinormal) poles of a finite-range potential.

    Each entry is (k_n, u_n(0), u_n(L)).  Poles must occur in
    time-reversal pairs k_{-n} = -conj(k_n) with u_{-n} = conj(u_n);
    purely imaginary poles are their own partner.  Construction fails
    when the pairing is violated.
    """

    L: float
    entries: tuple
    pairs: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.L < 0:
            raise ValueError("potential range must be non-negative")
        entries = tuple((complex(k), complex(u0), complex(uL)) for k, u0, uL in self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "pairs", self._pair_up(entries))

    @staticmethod
    def _pair_up(entries):
        scale = max((abs(k) for k, _, _ in entries), default=1.0)
        unused = list(range(len(entries)))
        pairs = []
        while unused:
            i = unused.pop(0)
            k, u0, uL = entries[i]
            mirror = -k.conjugate()
            if abs(k - mirror) <= _PAIR_TOL * scale:
                # self-paired pole on the imaginary axis must have real u's
                if abs(u0.imag) > _PAIR_TOL * abs(u0) or abs(uL.imag) > _PAIR_TOL * abs(uL):
                    raise ValueError(f"self-paired pole {k} requires real state amplitudes")
                pairs.append((i,))
                continue
            match = None
            for j in unused:
                kj, u0j, uLj = entries[j]
                if (abs(kj - mirror) <= _PAIR_TOL * scale
                        and abs(u0j - u0.conjugate()) <= _PAIR_TOL * max(abs(u0), 1e-30)
                        and abs(uLj - uL.conjugate()) <= _PAIR_TOL * max(abs(uL), 1e-30)):
                    match = j
                    break
            if match is None:
                raise ValueError(
                    f"resonance pole {k} has no time-reversal partner -conj(k) in the set")
            unused.remove(match)
            pairs.append((i, match))
        return tuple(pairs)

    def t_coefficients(self):
        """t_n = e^{-i k_n L} u_n(0) u_n(L) for every entry, in order."""
        return np.array([np.exp(-1j * k * self.L) * u0 * uL for k, u0, uL in self.entries])

    @classmethod
    def from_csv(cls, path, L: float) -> "ResonanceData":
        """Load entries from CSV columns re_kn, im_kn, re_un0, im_un0, re_unL, im_unL."""
        entries = []
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        header = [c.strip() for c in rows[0]]
        idx = {name: header.index(name)
               for name in ("re_kn", "im_kn", "re_un0", "im_un0", "re_unL", "im_unL")}
        for row in rows[1:]:
            k = complex(float(row[idx["re_kn"]]), float(row[idx["im_kn"]]))
            u0 = complex(float(row[idx["re_un0"]]), float(row[idx["im_un0"]]))
            uL = complex(float(row[idx["re_unL"]]), float(row[idx["im_unL"]]))
            entries.append((k, u0, uL))
        return cls(L=L, entries=tuple(entries))


@dataclass(frozen=True)
class FrequencySet:
    """Rabi-type frequencies of the virtual two-level system, in rad/ps."""

    omega_plus: float
    omega_minus: float
    omega_bar: float
    big_omega: float


def frequencies(packet: ModulatedPacket, E_b: float) -> FrequencySet:
    """omega_+- = (E_+- - E_b)/hbar and the derived beat frequencies.

    The beat frequency Omega = omega_+ - omega_- = (E+ - E-)/hbar is
    independent of the bound-state energy and equals 2 v_k dk.
    """
    hbar = packet.constants.hbar
    wp = (packet.E_plus - E_b) / hbar
    wm = (packet.E_minus - E_b) / hbar
    return FrequencySet(omega_plus=wp, omega_minus=wm,
                        omega_bar=0.5 * (wp + wm), big_omega=wp - wm)


def load_config(path) -> dict:
    """Read a scenario configuration JSON file.

    Recognised keys: lambda_eV_A, energy_eV, dk_invA, mass_ratio,
    hbar_eV_ps.  Unknown keys are rejected.
    """
    with open(path) as fh:
        raw = json.load(fh)
    allowed = {"lambda_eV_A", "energy_eV", "dk_invA", "mass_ratio", "hbar_eV_ps"}
    unknown = set(raw) - allowed
    if unknown:
        raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
    return raw


def model_from_config(config: dict):
    """Build (constants, packet, well-or-None) from a configuration dict."""
    constants = PhysicsConstants.for_mass_ratio(
        config.get("mass_ratio", 1.0),
        hbar=config.get("hbar_eV_ps", DEFAULT_CONSTANTS.hbar),
    )
    packet = ModulatedPacket.from_energy(
        config.get("energy_eV", 0.08), config.get("dk_invA", 0.0), constants)
    well = None
    if config.get("lambda_eV_A") is not None:
        well = DeltaWell(config["lambda_eV_A"], constants)
    return constants, packet, well
