"""The unified one-form for hybrid systems and every phase derived from it.

A one-form on parameter space whose coefficients are affine in the action
variables yields geometric phases as exact action-derivative reads: the
coefficient of a quantum action integrates to that level's phase, and minus
the coefficient of the classical action integrates to the angle shift.
Coupling corrections, weak-coupling approximations, and the fully quantum
coupled-oscillator comparison all reduce to closed-curve quadratures of
explicit coefficient fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable

import numpy as np

from .errors import EllipticViolation, ModeCollapse, OmegaImaginary, WeakCouplingViolated
from .manifold import (
    DEFAULT_SAMPLES,
    LoopSpec,
    QuadratureResult,
    StandardLoopParams,
    closed_line_integral,
    combined_parameter_loop,
    periodic_integral,
)
from .models import CoupledGHOHybrid, SpinOscillatorHybrid

_WEAK_COUPLING_MAX = 0.3  # largest allowed lam * Q_typ / B for the spin hybrid

BRANCH_COMMON = "common"
BRANCH_SUBSYSTEM = "per-subsystem"


@dataclass(frozen=True)
class LinearOneForm:
    """Sampled covector coefficients of a one-form affine in the actions.

    ``const`` is the action-independent part, ``action_coeffs[label]`` the
    coefficient of that quantum action, and ``j_coeff`` the coefficient of
    the classical action.  All arrays match the combined loop's samples.
    """

    loop: LoopSpec
    const: np.ndarray
    action_coeffs: dict[Hashable, np.ndarray]
    j_coeff: np.ndarray

    def __post_init__(self):
        shape = self.loop.points.shape
        arrays = [self.const, self.j_coeff, *self.action_coeffs.values()]
        for a in arrays:
            if np.asarray(a).shape != shape:
                raise ValueError(
                    f"coefficient shape {np.asarray(a).shape} does not match loop {shape}"
                )


@dataclass(frozen=True)
class PhaseSet:
    """Loop phases extracted from a one-form."""

    gammas: dict[Hashable, float]
    delta_phi: float
    const_integral: float
    quadrature_error: float


@dataclass(frozen=True)
class HybridPhaseReport:
    """Phases of the standard coupled-oscillator hybrid, decomposed into
    uncoupled parts and coupling corrections."""

    gamma: dict[int, float]
    delta_phi: float
    gamma_0_part: float
    gamma_I_part: float
    delta_phi_0_part: float
    delta_phi_I_part: float
    gamma_I_approx: float
    delta_phi_I_approx: float
    elliptic_margin: float
    quadrature_error: float
    branch: str


def phases_from_one_form(a: LinearOneForm, loop: LoopSpec | None = None) -> PhaseSet:
    """Integrate a one-form's coefficients around the loop.

    Because the coefficients are affine in the actions, each quantum phase is
    the exact circulation of its action coefficient, and the angle shift is
    minus the circulation of the classical-action coefficient.
    """
    loop = a.loop if loop is None else loop
    errs = []
    gammas: dict[Hashable, float] = {}
    for label, coeff in a.action_coeffs.items():
        res = closed_line_integral(coeff, loop)
        gammas[label] = res.value
        errs.append(res.error_estimate)
    res_j = closed_line_integral(a.j_coeff, loop)
    errs.append(res_j.error_estimate)
    res_e = closed_line_integral(a.const, loop)
    return PhaseSet(
        gammas=gammas,
        delta_phi=-res_j.value,
        const_integral=res_e.value,
        quadrature_error=max(errs),
    )


def spin_oscillator_one_form(m: SpinOscillatorHybrid) -> LinearOneForm:
    """One-form of the spin coupled to one classical oscillator.

    Coordinates are (cos phi, sin phi, X, Y, Z).  Each spin action couples to
    the azimuth with coefficient -1/2; the coupling correction enters the
    spin coefficients through the analytic action-derivative of the
    oscillator term, whose frequency is shifted by the population imbalance.
    """
    phi_pts = m.phi_loop.points
    xyz = m.x_loop.points
    x, y, z = xyz.T
    shift = m.mu * m.lam**2 * (m.i_plus - m.i_minus) / m.b_field
    x_eff = x + shift
    omega_sq = x_eff * z - y**2
    if np.any(omega_sq <= 0):
        j = int(np.argmax(omega_sq <= 0))
        raise OmegaImaginary(
            f"action-shifted frequency squared {omega_sq[j]:.3e} at sample {j}"
        )
    omega = np.sqrt(omega_sq)
    if m.j_action > 0:
        q_typ = np.sqrt(2.0 * z * m.j_action / omega)
        ratio = float(np.max(m.lam * q_typ / m.b_field))
        if ratio > _WEAK_COUPLING_MAX:
            raise WeakCouplingViolated(
                f"lam * Q_typ / B reaches {ratio:.3f}, beyond {_WEAK_COUPLING_MAX}"
            )

    n = phi_pts.shape[0]
    zeros = np.zeros(n)
    # dphi on the circle embedding (c, s): dphi = -s dc + c ds
    dphi = np.column_stack([-phi_pts[:, 1], phi_pts[:, 0], zeros, zeros, zeros])
    # d(Y/Z) over (X, Y, Z)
    d_y_over_z = np.column_stack([zeros, zeros, zeros, 1.0 / z, -y / z**2])
    # d(Z/Omega) over (X, Y, Z); Omega^2 = (X + shift) Z - Y^2
    d_omega = np.column_stack(
        [zeros, zeros, z / (2.0 * omega), -y / omega, x_eff / (2.0 * omega)]
    )
    e_z = np.column_stack([zeros, zeros, zeros, zeros, np.ones(n)])
    d_z_over_omega = e_z / omega[:, None] - (z / omega**2)[:, None] * d_omega

    correction = (m.mu * m.lam**2 * z**2 * m.j_action / (4.0 * omega**3 * m.b_field))[:, None]
    coeff_plus = -0.5 * dphi - correction * d_y_over_z
    coeff_minus = -0.5 * dphi + correction * d_y_over_z
    j_coeff = -(y / (2.0 * z))[:, None] * d_z_over_omega

    loop = LoopSpec(
        m.phi_loop.period,
        m.phi_loop.times,
        np.hstack([phi_pts, xyz]),
        cycles=1,
    )
    return LinearOneForm(
        loop=loop,
        const=np.zeros_like(loop.points),
        action_coeffs={"+": coeff_plus, "-": coeff_minus},
        j_coeff=j_coeff,
    )


def _bo_frequency_sq(x1: np.ndarray, x2: np.ndarray, k: float) -> tuple[np.ndarray, np.ndarray]:
    """(omega^2 of the fast triple, effective Omega^2 of the slow triple)."""
    w_sq = x1[:, 0] * x1[:, 2] - x1[:, 1] ** 2
    if np.any(w_sq <= 0):
        j = int(np.argmax(w_sq <= 0))
        raise EllipticViolation(f"fast-triple frequency squared {w_sq[j]:.3e}", sample=j)
    omega_eff_sq = x2[:, 0] * x2[:, 2] - k**2 * x1[:, 2] * x2[:, 2] / w_sq - x2[:, 1] ** 2
    return w_sq, omega_eff_sq


def _grad_y_over_z(points: np.ndarray, block: int) -> np.ndarray:
    """Covector of d(Y/Z) for the triple occupying columns 3*block..3*block+2."""
    n = points.shape[0]
    grad = np.zeros((n, points.shape[1]))
    y = points[:, 3 * block + 1]
    z = points[:, 3 * block + 2]
    grad[:, 3 * block + 1] = 1.0 / z
    grad[:, 3 * block + 2] = -y / z**2
    return grad


def coupled_gho_one_form(m: CoupledGHOHybrid, n_samples: int = DEFAULT_SAMPLES) -> LinearOneForm:
    """One-form of the quantum oscillator coupled to the classical one.

    Coordinates are the concatenated triples (X1, Y1, Z1, X2, Y2, Z2) over
    the common period.  The quantum-action coefficient multiplies d(Y1/Z1);
    the classical-action coefficient collects the coupling back-reaction on
    d(Y1/Z1) together with the slow oscillator's own d(Z2/Omega) term.
    """
    p = m.params
    p.require_elliptic()
    loop = combined_parameter_loop(p, n_samples)
    pts = loop.points
    x1, x2 = pts[:, :3], pts[:, 3:]
    w_sq, omega_sq = _bo_frequency_sq(x1, x2, p.k)
    if np.any(omega_sq <= 0):
        j = int(np.argmax(omega_sq <= 0))
        raise EllipticViolation(
            f"effective frequency squared {omega_sq[j]:.3e} at sample {j}", sample=j
        )
    w = np.sqrt(w_sq)
    omega = np.sqrt(omega_sq)
    z1, z2 = x1[:, 2], x2[:, 2]
    y2 = x2[:, 1]
    ksq = p.k**2

    grad_y1z1 = _grad_y_over_z(pts, 0)

    # gradient of Omega^2 = X2 Z2 - k^2 Z1 Z2 / omega^2 - Y2^2
    n = pts.shape[0]
    grad_osq = np.zeros((n, 6))
    grad_osq[:, 0] = ksq * z1**2 * z2 / w_sq**2
    grad_osq[:, 1] = -2.0 * ksq * z1 * z2 * x1[:, 1] / w_sq**2
    grad_osq[:, 2] = -ksq * z2 / w_sq + ksq * z1 * z2 * x1[:, 0] / w_sq**2
    grad_osq[:, 3] = z2
    grad_osq[:, 4] = -2.0 * y2
    grad_osq[:, 5] = x2[:, 0] - ksq * z1 / w_sq
    grad_omega = grad_osq / (2.0 * omega)[:, None]
    e_z2 = np.zeros((n, 6))
    e_z2[:, 5] = 1.0
    grad_z2_over_omega = e_z2 / omega[:, None] - (z2 / omega_sq)[:, None] * grad_omega

    nl = p.n_level
    quantum_coeff = (
        (2 * nl + 1) * z1 / (4.0 * w)
        + ksq * z1**2 * z2 * p.j_action / (2.0 * p.hbar * w_sq**2 * omega)
    )[:, None] * grad_y1z1
    j_coeff = (ksq * z1**2 * z2 / (2.0 * w_sq**2 * omega))[:, None] * grad_y1z1 - (
        y2 / (2.0 * z2)
    )[:, None] * grad_z2_over_omega

    return LinearOneForm(
        loop=loop,
        const=np.zeros_like(pts),
        action_coeffs={nl: quantum_coeff},
        j_coeff=j_coeff,
    )


def coupled_gho_effective_frequency(p: StandardLoopParams, t: np.ndarray) -> np.ndarray:
    """Effective slow frequency along the standard loops, in its reduced form
    a2 * sqrt(1 - eps^2 - 2 D^2 (1 - eps cos w1 t)(1 - eps cos w2 t))."""
    eps, d = p.epsilon, p.d_ratio
    f1 = 1.0 - eps * np.cos(p.omega1 * t)
    f2 = 1.0 - eps * np.cos(p.omega2 * t)
    core = 1.0 - eps**2 - 2.0 * d**2 * f1 * f2
    if np.any(core <= 0):
        j = int(np.argmax(core <= 0))
        raise EllipticViolation(
            f"effective frequency squared vanished at sample {j}", sample=j
        )
    return p.a2 * np.sqrt(core)


def gamma_n0_closed_form(p: StandardLoopParams, branch: str = BRANCH_COMMON) -> float:
    """Uncoupled quantum phase: (2n+1)(1 - sqrt(1-eps^2)) T w1 / (4 sqrt(1-eps^2)).

    On the per-subsystem branch the integration range is one fast-triple
    cycle, so T w1 reduces to 2 pi.
    """
    root = math.sqrt(1.0 - p.epsilon**2)
    t_omega = 2.0 * math.pi if branch == BRANCH_SUBSYSTEM else p.common_period * p.omega1
    return (2 * p.n_level + 1) * (1.0 - root) * t_omega / (4.0 * root)


def elliptic_bound(p: StandardLoopParams) -> tuple[float, float]:
    """Largest dimensionless coupling and coupling constant satisfying the
    worst-case positivity of the effective frequency."""
    eps = p.epsilon
    d_max = math.sqrt((1.0 - eps**2) / 2.0) / (1.0 + eps)
    k_max = d_max * math.sqrt(2.0 * p.mu1 * p.mu2 * p.a1 * p.a2 * (1.0 - eps**2))
    return d_max, k_max


def standard_loop_report(
    p: StandardLoopParams,
    n_samples: int = DEFAULT_SAMPLES,
    branch: str | None = None,
) -> HybridPhaseReport:
    """Phases and angle of the standard coupled-oscillator hybrid.

    The uncoupled quantum part comes from its closed form; the remaining
    pieces are periodic-trapezoid quadratures of the explicit integrands over
    the common period (or over each subsystem's own period on the uncoupled
    branch, which is only legal at k = 0).  The coupling correction pair is
    computed from one shared integrand array, so the antisymmetry between
    phase and angle corrections holds to rounding.
    """
    if branch is None:
        branch = BRANCH_SUBSYSTEM if p.k == 0.0 else BRANCH_COMMON
    if branch not in (BRANCH_COMMON, BRANCH_SUBSYSTEM):
        raise ValueError(f"unknown branch {branch!r}")
    if branch == BRANCH_SUBSYSTEM and p.k != 0.0:
        raise ValueError("per-subsystem integration ranges require k = 0")
    p.require_elliptic()

    eps, d = p.epsilon, p.d_ratio
    one_minus = 1.0 - eps**2
    root = math.sqrt(one_minus)
    errs = [0.0]

    if branch == BRANCH_COMMON:
        t1 = np.linspace(0.0, p.common_period, n_samples + 1)
        t2 = t1
        period1 = period2 = p.common_period
    else:
        period1 = 2.0 * math.pi / p.omega1
        period2 = 2.0 * math.pi / p.omega2
        t1 = np.linspace(0.0, period1, n_samples + 1)
        t2 = np.linspace(0.0, period2, n_samples + 1)

    gamma_0 = gamma_n0_closed_form(p, branch)

    # Coupling corrections share one integrand, evaluated on the range that
    # carries both drives (the common period; they vanish identically at k=0).
    if p.k == 0.0:
        gamma_i = 0.0
        delta_phi_i = 0.0
    else:
        f2 = 1.0 - eps * np.cos(p.omega2 * t1)
        drive = eps - np.cos(p.omega1 * t1)
        omega_eff = coupled_gho_effective_frequency(p, t1)
        base = d**2 * p.a2**2 * eps * p.omega1 * f2 * drive / (p.a1 * one_minus * omega_eff)
        res_dphi = periodic_integral(-base, period1)
        res_gamma = periodic_integral((p.j_action / p.hbar) * base, period1)
        delta_phi_i = res_dphi.value
        gamma_i = res_gamma.value
        errs.extend([res_dphi.error_estimate, res_gamma.error_estimate])

    # Uncoupled angle shift, with the effective frequency kept inside.
    f2b = 1.0 - eps * np.cos(p.omega2 * t2)
    s2 = np.sin(p.omega2 * t2)
    if p.k == 0.0:
        core = np.full_like(t2, root)
        core_dot = np.zeros_like(t2)
    else:
        f1b = 1.0 - eps * np.cos(p.omega1 * t2)
        core_sq = one_minus - 2.0 * d**2 * f1b * f2b
        if np.any(core_sq <= 0):
            j = int(np.argmax(core_sq <= 0))
            raise EllipticViolation(
                f"effective frequency squared vanished at sample {j}", sample=j
            )
        core = np.sqrt(core_sq)
        prod_dot = eps * p.omega1 * np.sin(p.omega1 * t2) * f2b + f1b * eps * p.omega2 * s2
        core_dot = -(d**2) * prod_dot / core
    integrand0 = -(eps**2) * p.omega2 * s2**2 / (2.0 * core * f2b) + eps * s2 * core_dot / (
        2.0 * core**2
    )
    res0 = periodic_integral(integrand0, period2)
    delta_phi_0 = res0.value
    errs.append(res0.error_estimate)

    t_omega1 = 2.0 * math.pi if branch == BRANCH_SUBSYSTEM else p.common_period * p.omega1
    gamma_i_approx = eps**2 * p.a2 * p.j_action * d**2 * t_omega1 / (
        p.hbar * p.a1 * one_minus * root
    )
    delta_phi_i_approx = -(eps**2) * p.a2 * d**2 * t_omega1 / (p.a1 * one_minus * root)

    if p.k == 0.0:
        margin = one_minus
    else:
        f1m = 1.0 - eps * np.cos(p.omega1 * t1)
        f2m = 1.0 - eps * np.cos(p.omega2 * t1)
        margin = float(np.min(one_minus - 2.0 * d**2 * f1m * f2m))

    return HybridPhaseReport(
        gamma={p.n_level: gamma_0 + gamma_i},
        delta_phi=delta_phi_0 + delta_phi_i,
        gamma_0_part=gamma_0,
        gamma_I_part=gamma_i,
        delta_phi_0_part=delta_phi_0,
        delta_phi_I_part=delta_phi_i,
        gamma_I_approx=gamma_i_approx,
        delta_phi_I_approx=delta_phi_i_approx,
        elliptic_margin=margin,
        quadrature_error=max(errs),
        branch=branch,
    )


def single_gho_phase(loop: LoopSpec, n: int) -> QuadratureResult:
    """Phase of one isolated generalized oscillator around its triple loop:
    the circulation of (2n+1) Z/(4 omega) d(Y/Z)."""
    x, y, z = loop.points.T
    w_sq = x * z - y**2
    if np.any(w_sq <= 0):
        j = int(np.argmax(w_sq <= 0))
        raise EllipticViolation(f"frequency squared {w_sq[j]:.3e} at sample {j}", sample=j)
    w = np.sqrt(w_sq)
    fac = (2 * n + 1) / (4.0 * w)
    coeffs = np.column_stack([np.zeros_like(w), fac, -fac * y / z])
    return closed_line_integral(coeffs, loop)


def _combined(x1_loop: LoopSpec, x2_loop: LoopSpec) -> LoopSpec:
    if x1_loop.n_segments != x2_loop.n_segments:
        raise ValueError("the two loops must share their sampling")
    if abs(x1_loop.period - x2_loop.period) > 1e-12 * x1_loop.period:
        raise ValueError("the two loops must share their period")
    return LoopSpec(
        x1_loop.period,
        x1_loop.times,
        np.hstack([x1_loop.points, x2_loop.points]),
        cycles=1,
    )


def full_quantum_phase(
    x1_loop: LoopSpec, x2_loop: LoopSpec, k: float, m: int, n: int
) -> float:
    """Phase of the fully quantum coupled-oscillator state with m quanta in
    the upper normal mode and n in the lower.

    Evaluates the normal-mode connection coefficients sample by sample and
    integrates around the pair of loops.  Raises ``ModeCollapse`` when the
    coupling closes the lower mode anywhere along the loop.
    """
    if m < 0 or n < 0:
        raise ValueError("mode occupation numbers must be nonnegative")
    combined = _combined(x1_loop, x2_loop)
    pts = combined.points
    x1, x2 = pts[:, :3], pts[:, 3:]
    w1_sq = x1[:, 0] * x1[:, 2] - x1[:, 1] ** 2
    w2_sq = x2[:, 0] * x2[:, 2] - x2[:, 1] ** 2
    if np.any(w1_sq <= 0) or np.any(w2_sq <= 0):
        raise EllipticViolation("a bare triple is not elliptic along the loop")
    r = np.sqrt((w1_sq - w2_sq) ** 2 + 4.0 * k**2 * x1[:, 2] * x2[:, 2])
    low_sq = 0.5 * (w1_sq + w2_sq - r)
    if np.any(low_sq <= 0):
        j = int(np.argmax(low_sq <= 0))
        raise ModeCollapse(f"lower normal mode closes at sample {j}")
    high = np.sqrt(0.5 * (w1_sq + w2_sq + r))
    low = np.sqrt(low_sq)
    with np.errstate(invalid="ignore", divide="ignore"):
        sin_sq = np.where(r > 0, np.clip((w2_sq - w1_sq + r) / (2.0 * r), 0.0, 1.0), 0.0)
    cos_sq = 1.0 - sin_sq

    t1 = (x1[:, 2] / 4.0) * ((2 * m + 1) * cos_sq / high + (2 * n + 1) * sin_sq / low)
    t2 = (x2[:, 2] / 4.0) * ((2 * m + 1) * sin_sq / high + (2 * n + 1) * cos_sq / low)
    coeffs = t1[:, None] * _grad_y_over_z(pts, 0) + t2[:, None] * _grad_y_over_z(pts, 1)
    return closed_line_integral(coeffs, combined).value


def bo_full_quantum_phase_parts(
    x1_loop: LoopSpec, x2_loop: LoopSpec, k: float, m: int, n: int, hbar: float = 1.0
) -> tuple[float, float]:
    """The two quadrature pieces of the slow/fast-separated quantum phase:
    the d(Y1/Z1) part and the d(Y2/Z2) part.

    Here ``n`` counts the fast oscillator's level and ``m`` the slow one's
    (unlike ``full_quantum_phase``, whose ``m`` counts the upper normal
    mode).  ``hbar`` fixes the action scale in the correspondence
    J = (m + 1/2) hbar used by callers comparing against the hybrid phases;
    the integrands themselves are hbar-free.
    """
    del hbar
    if m < 0 or n < 0:
        raise ValueError("mode occupation numbers must be nonnegative")
    combined = _combined(x1_loop, x2_loop)
    pts = combined.points
    x1, x2 = pts[:, :3], pts[:, 3:]
    w_sq, omega_sq = _bo_frequency_sq(x1, x2, k)
    if np.any(omega_sq <= 0):
        j = int(np.argmax(omega_sq <= 0))
        raise EllipticViolation(
            f"effective frequency squared {omega_sq[j]:.3e} at sample {j}", sample=j
        )
    w = np.sqrt(w_sq)
    omega = np.sqrt(omega_sq)
    z1, z2 = x1[:, 2], x2[:, 2]

    t1 = (2 * n + 1) * z1 / (4.0 * w) + (2 * m + 1) * k**2 * z1**2 * z2 / (
        4.0 * w_sq**2 * omega
    )
    t2 = (2 * m + 1) * z2 / (4.0 * omega)
    part1 = closed_line_integral(t1[:, None] * _grad_y_over_z(pts, 0), combined).value
    part2 = closed_line_integral(t2[:, None] * _grad_y_over_z(pts, 1), combined).value
    return part1, part2


def bo_full_quantum_phase(
    x1_loop: LoopSpec, x2_loop: LoopSpec, k: float, m: int, n: int, hbar: float = 1.0
) -> float:
    """Slow/fast-separated quantum phase (sum of both quadrature pieces)."""
    p1, p2 = bo_full_quantum_phase_parts(x1_loop, x2_loop, k, m, n, hbar)
    return p1 + p2
