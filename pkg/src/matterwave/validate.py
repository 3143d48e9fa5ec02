"""Runtime invariant suite behind the ``validate`` command.

Each check evaluates one analytic identity the library is built on and
reports the measured residual against its pinned tolerance.  A fault can
be injected into one of the evaluators (or into the stored constants) to
confirm the suite actually detects breakage; that is the only intended
use of the injection hooks.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import analysis, asymptotics, solver, specfun
from .constants import DEFAULT_CONSTANTS, PhysicsConstants
from .model import DeltaWell, ModulatedPacket, frequencies

FAULT_MODES = ("faddeeva", "moshinsky", "frequencies", "phase_time", "hbar2")

_STANDARD_LAMBDA = 4.27
_STANDARD_ENERGY = 0.08


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    residual: float
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _perturb(value, active: bool):
    return value * (1.0 + 1e-6) if active else value


def run_invariant_suite(constants: PhysicsConstants | None = None,
                        inject_fault: str | None = None,
                        seed: int = 20240817) -> list:
    """Run every invariant check; returns a list of CheckResult."""
    if inject_fault is not None and inject_fault not in FAULT_MODES:
        raise ValueError(f"unknown fault mode {inject_fault!r}; choose from {FAULT_MODES}")
    if constants is None:
        constants = DEFAULT_CONSTANTS
    if inject_fault == "hbar2":
        constants = PhysicsConstants(constants.hbar, constants.hbar_over_m,
                                     constants.hbar2_over_2m * (1.0 + 1e-6))

    rng = np.random.default_rng(seed)
    results = []

    def record(name, tolerance, residual):
        residual = float(residual)
        results.append(CheckResult(name=name, tolerance=tolerance, residual=residual,
                                   passed=residual <= tolerance))

    def w(z):
        return _perturb(specfun.faddeeva(z), inject_fault == "faddeeva")

    def m_fn(x, q, t):
        return _perturb(specfun.moshinsky(x, q, t, constants), inject_fault == "moshinsky")

    # constants consistency: hbar^2/2m must equal hbar * (hbar/m) / 2 as stored
    record("constants_consistency", 1e-12,
           abs(constants.hbar2_over_2m - 0.5 * constants.hbar * constants.hbar_over_m)
           / constants.hbar2_over_2m)

    # Faddeeva reflection w(-z) = 2 exp(-z^2) - w(z).  Direct relative check
    # where the identity is well conditioned (|Re z^2| <= 8); elsewhere the
    # residual is scaled by the largest term, since 2 exp(-z^2) can exceed w
    # by many orders and cancellation bounds any double evaluation.
    z = rng.uniform(-4, 4, 300) + 1j * rng.uniform(-4, 4, 300)
    lhs = w(-z)
    rhs = 2.0 * np.exp(-z * z) - w(z)
    cond = np.abs((z * z).real) <= 8.0
    record("faddeeva_reflection", 1e-10,
           np.max(np.abs(lhs[cond] - rhs[cond]) / np.abs(lhs[cond])))
    scale = 2.0 * np.abs(np.exp(-z * z)) + np.abs(w(z)) + np.abs(lhs)
    record("faddeeva_reflection_scaled", 1e-13, np.max(np.abs(lhs - rhs) / scale))

    # Schwarz-type symmetry w(conj(-z)) = conj(w(z))
    record("faddeeva_schwarz", 1e-13,
           np.max(np.abs(w(np.conj(-z)) - np.conj(w(z))) / np.abs(w(z))))

    # Moshinsky x = 0 identity M(y0_q) + M(y0_-q) = exp(-i hbar q^2 t / 2m)
    qs = np.geomspace(0.01, 1.0, 12)
    ts = np.geomspace(1e-4, 10.0, 12)
    qq, tt = np.meshgrid(qs, ts)
    ident = m_fn(0.0, qq, tt) + m_fn(0.0, -qq, tt)
    target = np.exp(-0.5j * constants.hbar_over_m * qq * qq * tt)
    record("moshinsky_x0_identity", 1e-10, np.max(np.abs(ident - target)))

    # |M| stays order one for real momenta
    record("moshinsky_bounded", 1.2, np.max(np.abs(m_fn(0.0, qq, tt))))

    # exact evaluator against the asymptotic branches at |y| = 20
    hom = constants.hbar_over_m
    t0 = 0.01
    yabs = 20.0
    phases = rng.uniform(0, 2 * np.pi, 100)
    scale = np.sqrt(2 * hom * t0)
    worst = 0.0
    for ph in phases:
        y_target = yabs * np.exp(1j * ph)
        # invert y = e^{-i pi/4}(x - hom q t)/scale at x = 0
        q = -y_target * np.exp(0.25j * np.pi) * scale / (hom * t0)
        exact = m_fn(0.0, q, t0)
        approx = specfun.moshinsky_asymptotic(0.0, q, t0, constants)
        worst = max(worst, abs(exact - approx) / abs(exact))
    record("moshinsky_asymptotic_agreement", 1e-3, worst)

    # specialization: general pole/residue solution vs closed-form delta well
    well = DeltaWell(_STANDARD_LAMBDA, constants)
    packet = ModulatedPacket.from_energy(_STANDARD_ENERGY, 0.001, constants)
    xs = rng.uniform(0.0, 2000.0, 100)
    ts_r = 10.0 ** rng.uniform(-3, 1, 100)
    tx = solver.delta_transmission(well)
    gen = solver.psi_general(xs, ts_r, packet.q_poles(), tx, well.resonance_data(),
                             packet.q_transform)
    if inject_fault == "moshinsky":
        gen = _perturb(gen, True)
    record("specialization_equivalence", 1e-12,
           np.max(np.abs(gen - solver.psi_delta(xs, ts_r, well, packet))))

    # free limit lambda -> 0
    tiny = DeltaWell(1e-12, constants)
    record("free_limit", 1e-9,
           np.max(np.abs(solver.psi_delta(xs, ts_r, tiny, packet)
                         - solver.psi_free(xs, ts_r, packet))))

    # Omega = (E+ - E-)/hbar must equal 2 v_k dk
    res = 0.0
    for _ in range(20):
        k = rng.uniform(0.02, 1.0)
        dk = rng.uniform(0.0, 1.0) * k
        pk = ModulatedPacket(k, dk, constants)
        freq = frequencies(pk, E_b=-rng.uniform(0.0, 2.0))
        omega = _perturb(freq.big_omega, inject_fault == "frequencies")
        ref = 2.0 * pk.v_k * pk.dk
        if ref > 0:
            res = max(res, abs(omega - ref) / ref)
    record("frequency_identity", 1e-12, res)

    # phase time: closed form vs hbar d(arg t)/dE
    worst = 0.0
    for k in np.linspace(0.05, 1.0, 20):
        pt = analysis.phase_time(well, k)
        num = _perturb(pt.numerical, inject_fault == "phase_time")
        worst = max(worst, abs(pt.value - num) / abs(pt.value))
    record("phase_time_consistency", 1e-8, worst)

    # two-level closed form against |psi_2l|^2
    xs2 = rng.uniform(500.0, 5000.0, 200)
    ts2 = rng.uniform(0.5, 50.0, 200)
    r_closed = asymptotics.rho_two_level(xs2, ts2, packet, well.transmission)
    r_direct = np.abs(asymptotics.psi_two_level(xs2, ts2, packet, well.transmission)) ** 2
    record("two_level_consistency", 1e-11, np.max(np.abs(r_closed - r_direct)))

    # beat density against the squared three-level wave
    tb = np.linspace(0.05, 50.0, 500)
    rb = asymptotics.rho_beats_x0(tb, well, packet)
    rd = np.abs(asymptotics.psi_edge_persistent(tb, well, packet)) ** 2
    record("beat_density_consistency", 1e-10, np.max(np.abs(rb - rd)))

    return results
