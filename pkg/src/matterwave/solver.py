"""Exact transmitted wavefunctions of the quantum-shutter problem.

For a finite-range potential with resonance poles k_n (coefficients
t_n = e^{-i k_n L} u_n(0) u_n(L)) and an initial state whose Q-transform
has simple poles kappa_m with residues alpha_m, the transmitted wave for
x >= L, t > 0 is

    Psi(x, t) = - [ sum_m alpha_m t(kappa_m) M(y_kappa_m)
                    + i sum_n t_n Phi(0, k, k_n) M(y_k_n) ].

The delta well keeps a single self-paired pole i*lambda_tilde with
t_n -> lambda_tilde, giving the closed form Psi = psi_+ + psi_- with

    psi_+- = (1/2i) [ t(k+-) M(y_k+-) - t(-k+-) M(y_-k+-)
                      + lambda_tilde Phi(0, k, i lambda_tilde) M(y_il) ],

and the free packet is the same expression with t == 1 and no pole term.
All evaluators broadcast over numpy arrays of x and t.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_CONSTANTS
from .model import DeltaWell, ModulatedPacket, PoleError, QTransformML, ResonanceData
from .specfun import moshinsky

#: poles closer than this to a resonance wavenumber break the simple-pole
#: derivation of the general solution
_COLLISION_TOL = 1e-12


def psi_free(x, t, packet: ModulatedPacket):
    """Free modulated wavepacket solution for x >= 0, t > 0."""
    c = packet.constants
    kp, km = packet.k_plus, packet.k_minus
    return (moshinsky(x, kp, t, c) + moshinsky(x, km, t, c)
            - moshinsky(x, -kp, t, c) - moshinsky(x, -km, t, c)) / 2j


def psi_delta_components(x, t, well: DeltaWell, packet: ModulatedPacket):
    """Fast and slow channel waves (psi_+, psi_-) for the delta well.

    Each component carries the full bound-state pole term, so
    psi_+ + psi_- reproduces the general-solution resonance weight -i t_n.
    """
    c = packet.constants
    lt = well.lambda_tilde
    bound = lt * packet.q_transform(well.bound_pole) * moshinsky(x, 1j * lt, t, c)

    def channel(kq):
        return (well.transmission(kq) * moshinsky(x, kq, t, c)
                - well.transmission(-kq) * moshinsky(x, -kq, t, c)
                + bound) / 2j

    return channel(packet.k_plus), channel(packet.k_minus)


def psi_delta(x, t, well: DeltaWell, packet: ModulatedPacket):
    """Transmitted wave Psi(x, t) for the attractive delta well, x >= 0."""
    plus, minus = psi_delta_components(x, t, well, packet)
    return plus + minus


def psi_general(x, t, q_poles: QTransformML, transmission, resonances: ResonanceData,
                q_transform, n_pairs: int | None = None, return_residual: bool = False):
    """General pole/residue solution for x >= L, t > 0.

    Parameters
    ----------
    q_poles : QTransformML
        Poles kappa_m and residues alpha_m of the initial state's
        Q-transform.
    transmission : callable
        Stationary transmission amplitude t(q), evaluated at the
        Q-transform poles.
    resonances : ResonanceData
        Resonance poles and state amplitudes of the potential.
    q_transform : callable
        The Q-transform itself, evaluated at the resonance poles.
    n_pairs : int, optional
        Number of time-reversal pole pairs kept in the resonance sum
        (pairs are truncated together to preserve conjugate symmetry).
        Default keeps every supplied pair.
    return_residual : bool
        Also return the magnitude of the last included resonance term as
        a truncation estimate.
    """
    if q_poles.constant_term != 0:
        warnings.warn("nonzero Q-transform constant term is ignored by the "
                      "pole/residue solution; results are unvalidated for such states",
                      stacklevel=2)
    res_k = np.array([e[0] for e in resonances.entries])
    for kappa in q_poles.poles:
        if res_k.size and np.min(np.abs(res_k - kappa)) < _COLLISION_TOL:
            raise PoleError(f"Q-transform pole {kappa} collides with a resonance pole")

    constants = getattr(transmission, "constants", DEFAULT_CONSTANTS)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    total = np.zeros(np.broadcast(x, t).shape, dtype=complex)
    for kappa, alpha in zip(q_poles.poles, q_poles.residues):
        total += alpha * transmission(kappa) * moshinsky(x, kappa, t, constants)

    pairs = resonances.pairs if n_pairs is None else resonances.pairs[:n_pairs]
    t_all = resonances.t_coefficients()
    res_sum = np.zeros_like(total)
    last_term = np.zeros_like(total)
    for pair in pairs:
        last_term = sum(t_all[i] * q_transform(res_k[i]) * moshinsky(x, res_k[i], t, constants)
                        for i in pair)
        res_sum += last_term
    psi = -(total + 1j * res_sum)
    psi = psi if psi.shape else complex(psi)
    if return_residual:
        return psi, float(np.max(np.abs(last_term)))
    return psi


def delta_transmission(well: DeltaWell):
    """Transmission callable for :func:`psi_general`, tagged with constants."""
    def tx(q):
        return well.transmission(q)
    # psi_general picks the unit system off the callable
    tx.constants = well.constants
    return tx


def unit_transmission(constants=DEFAULT_CONSTANTS):
    """t(q) == 1, the free propagation amplitude."""
    def tx(q):
        return np.ones_like(np.asarray(q, dtype=complex)) if np.ndim(q) else 1.0 + 0j
    tx.constants = constants
    return tx


@dataclass
class ComplexTrace:
    """Sampled wavefunction along t (fixed x) or along x (fixed t)."""

    axis: str  # "t" or "x"
    fixed: float
    grid: np.ndarray
    psi: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("trace grid must be strictly increasing, length >= 2")
        if not np.all(np.isfinite(self.psi)):
            raise ValueError("trace values must be finite")
        self.grid = grid


@dataclass
class DensityTrace:
    """Probability density along a grid, optionally with the channel split
    rho = rho_plus + rho_minus + rho_int, rho_int = 2 Re(psi_+ psi_-^*)."""

    axis: str
    fixed: float
    grid: np.ndarray
    rho: np.ndarray
    rho_plus: np.ndarray | None = None
    rho_minus: np.ndarray | None = None
    rho_int: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    @property
    def has_components(self) -> bool:
        return self.rho_plus is not None


def density(psi_fn, grid, fixed: float, axis: str = "t", pair_fn=None,
            params: dict | None = None) -> DensityTrace:
    """Evaluate |psi|^2 on a grid at fixed x (axis='t') or fixed t (axis='x').

    ``psi_fn(x, t)`` must broadcast over arrays.  When ``pair_fn`` is given
    it must return the (psi_+, psi_-) split; the density is then assembled
    as rho_+ + rho_- + rho_int so the decomposition is exact by
    construction.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("density grid must be strictly increasing, length >= 2")
    if axis == "t":
        xs, ts = fixed, grid
    elif axis == "x":
        xs, ts = grid, fixed
    else:
        raise ValueError("axis must be 't' or 'x'")
    params = dict(params or {})
    if pair_fn is not None:
        plus, minus = pair_fn(xs, ts)
        rho_p = np.abs(plus) ** 2
        rho_m = np.abs(minus) ** 2
        rho_i = 2.0 * (plus * np.conj(minus)).real
        rho = rho_p + rho_m + rho_i
        return DensityTrace(axis=axis, fixed=float(fixed), grid=grid, rho=rho,
                            rho_plus=rho_p, rho_minus=rho_m, rho_int=rho_i, params=params)
    psi = psi_fn(xs, ts)
    return DensityTrace(axis=axis, fixed=float(fixed), grid=grid,
                        rho=np.abs(psi) ** 2, params=params)


def delta_density_trace(well: DeltaWell, packet: ModulatedPacket, grid, fixed: float,
                        axis: str = "t", components: bool = False) -> DensityTrace:
    """Density trace of the delta-well solution."""
    params = {"potential": "delta", "lambda_eV_A": well.lam, "k_invA": packet.k,
              "dk_invA": packet.dk}
    pair = (lambda xs, ts: psi_delta_components(xs, ts, well, packet)) if components else None
    return density(lambda xs, ts: psi_delta(xs, ts, well, packet), grid, fixed,
                   axis=axis, pair_fn=pair, params=params)


def free_density_trace(packet: ModulatedPacket, grid, fixed: float,
                       axis: str = "t") -> DensityTrace:
    """Density trace of free propagation."""
    params = {"potential": "free", "k_invA": packet.k, "dk_invA": packet.dk}
    return density(lambda xs, ts: psi_free(xs, ts, packet), grid, fixed,
                   axis=axis, params=params)
