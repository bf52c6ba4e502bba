"""Closed-form model zoo: spin in a magnetic field, generalized harmonic
oscillators, the two hybrid systems, and the coupled-oscillator normal modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EllipticViolation, ModeCollapse, ZeroField
from .manifold import DEFAULT_SAMPLES, LoopSpec, StandardLoopParams, make_loop
from .quantum_geometry import HamiltonianFamily, pauli_matrices

_AXIS_EPS = 1e-14


def spin_hamiltonian_family(mu: float = 1.0) -> HamiltonianFamily:
    """The two-level family H(B) = -mu * sigma . B over field space."""
    s1, s2, s3 = pauli_matrices()

    def evaluate(b: np.ndarray) -> np.ndarray:
        return -mu * (b[0] * s1 + b[1] * s2 + b[2] * s3)

    return HamiltonianFamily(dim=2, eval=evaluate)


def cone_loop(
    theta: float,
    b: float = 1.0,
    period: float = 1.0,
    n_samples: int = DEFAULT_SAMPLES,
    cycles: int = 1,
) -> LoopSpec:
    """Field loop at constant polar angle theta on the sphere of radius b."""
    w = 2.0 * math.pi * cycles / period
    st, ct = math.sin(theta), math.cos(theta)

    def f(t: float) -> np.ndarray:
        return b * np.array([st * math.cos(w * t), st * math.sin(w * t), ct])

    return make_loop(f, period, n_samples, cycles=cycles)


@dataclass(frozen=True)
class SpinFieldModel:
    """A magnetic moment driven around a closed field loop."""

    mu: float
    b_loop: LoopSpec

    def __post_init__(self):
        if self.b_loop.dim != 3:
            raise ValueError("field loop must be 3-dimensional")
        norms = np.linalg.norm(self.b_loop.points, axis=1)
        if not np.all(norms > 0):
            raise ZeroField("field magnitude must stay positive along the loop")

    def family(self) -> HamiltonianFamily:
        return spin_hamiltonian_family(self.mu)


def spin_eigensystem(b: np.ndarray, mu: float = 1.0):
    """Closed-form eigenpairs of -mu * sigma . B, energies (-mu B, +mu B).

    Component ordering is (lower, upper).  On the field axis B1 = B2 = 0 the
    formulas degenerate to 0/0; the values used there are the limits along
    B1 -> 0+, which gives (0, 1) and (1, 0) on the north side and (1, 0),
    (0, -1) on the south side.
    """
    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    if norm == 0.0:
        raise ZeroField("spin eigensystem undefined at zero field")
    b1, b2, b3 = b
    if math.hypot(b1, b2) <= _AXIS_EPS * norm:
        if b3 > 0:
            v1 = np.array([0.0, 1.0], dtype=complex)
            v2 = np.array([1.0, 0.0], dtype=complex)
        else:
            v1 = np.array([1.0, 0.0], dtype=complex)
            v2 = np.array([0.0, -1.0], dtype=complex)
    else:
        f = b1 + 1j * b2
        v1 = np.array(
            [f / math.sqrt(2.0 * norm * (norm + b3)), math.sqrt((norm + b3) / (2.0 * norm))]
        )
        v2 = np.array(
            [f / math.sqrt(2.0 * norm * (norm - b3)), -math.sqrt((norm - b3) / (2.0 * norm))]
        )
    return (-mu * norm, v1), (mu * norm, v2)


@dataclass(frozen=True)
class SpinEffectiveField:
    """Total field, mixing angle and level energies of the coupled spin."""

    b_tot: float
    theta: float
    e_plus: float
    e_minus: float


def spin_oscillator_effective(b: float, lam: float, q: float, mu: float = 1.0) -> SpinEffectiveField:
    """Effective field seen by the spin at oscillator displacement q.

    b_tot = sqrt(b^2 + lam^2 q^2), cos(theta) = lam q / b_tot, and the level
    energies are +/- mu b_tot.
    """
    if not b > 0:
        raise ValueError("bare field magnitude must be positive")
    b_tot = math.hypot(b, lam * q)
    cos_theta = lam * q / b_tot
    theta = math.acos(max(-1.0, min(1.0, cos_theta)))
    return SpinEffectiveField(b_tot=b_tot, theta=theta, e_plus=mu * b_tot, e_minus=-mu * b_tot)


def spin_oscillator_weak_expansion(b: float, lam: float, q: float) -> float:
    """Second-order expansion of the total field, b + lam^2 q^2 / (2 b)."""
    if not b > 0:
        raise ValueError("bare field magnitude must be positive")
    return b + (lam * q) ** 2 / (2.0 * b)


@dataclass(frozen=True)
class GHOTriple:
    """One generalized-oscillator parameter triple (X, Y, Z)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError("Z must be positive")

    @property
    def omega_sq(self) -> float:
        return self.x * self.z - self.y**2

    @property
    def omega(self) -> float:
        w2 = self.omega_sq
        if not w2 > 0:
            raise EllipticViolation(f"X Z - Y^2 = {w2:.3e} is not positive")
        return math.sqrt(w2)


def gho_effective_energy(x1: GHOTriple, k: float, q: float, n: int, hbar: float = 1.0) -> float:
    """Level energy of the oscillator shifted by the coupling k q:
    (n + 1/2) hbar omega - Z1 k^2 q^2 / (2 omega^2).
    """
    if n < 0:
        raise ValueError("level index must be nonnegative")
    w = x1.omega
    return (n + 0.5) * hbar * w - x1.z * k**2 * q**2 / (2.0 * w**2)


@dataclass(frozen=True)
class NormalModeSplit:
    """Mixing angle and frequencies of the two coupled-oscillator normal modes."""

    beta: float
    omega_1: float
    omega_2: float

    def __post_init__(self):
        if not (self.omega_1 >= self.omega_2 > 0):
            raise ValueError("normal frequencies must satisfy omega_1 >= omega_2 > 0")


def normal_mode_split(x1: GHOTriple, x2: GHOTriple, k: float) -> NormalModeSplit:
    """Diagonalize two bilinearly coupled generalized oscillators.

    Fails with ``ModeCollapse`` when the coupling pushes the lower mode
    frequency to zero, i.e. when omega_1^2 omega_2^2 <= k^2 Z1 Z2.  At k = 0
    with identical frequencies the mixing angle is taken to be 0.
    """
    w1sq = x1.omega**2
    w2sq = x2.omega**2
    r = math.sqrt((w1sq - w2sq) ** 2 + 4.0 * k**2 * x1.z * x2.z)
    low = 0.5 * (w1sq + w2sq - r)
    if not low > 0:
        raise ModeCollapse(
            f"lower normal frequency squared {low:.3e} is not positive "
            f"(omega1^2 omega2^2 = {w1sq * w2sq:.3e}, k^2 Z1 Z2 = {k**2 * x1.z * x2.z:.3e})"
        )
    high = 0.5 * (w1sq + w2sq + r)
    if r == 0.0:
        beta = 0.0
    else:
        sin_b = math.sqrt(max(0.0, (w2sq - w1sq + r) / (2.0 * r)))
        beta = math.asin(min(1.0, sin_b))
    return NormalModeSplit(beta=beta, omega_1=math.sqrt(high), omega_2=math.sqrt(low))


@dataclass(frozen=True)
class SpinOscillatorHybrid:
    """A spin in a rotating planar field coupled to one classical oscillator.

    ``phi_loop`` is the field azimuth embedded as (cos phi, sin phi);
    ``x_loop`` carries the oscillator triple (X, Y, Z).  Both must share the
    common period and sampling.  ``i_plus``/``i_minus`` are the spin-level
    actions and ``j_action`` the oscillator action.
    """

    mu: float
    lam: float
    b_field: float
    phi_loop: LoopSpec
    x_loop: LoopSpec
    i_plus: float
    i_minus: float
    j_action: float

    def __post_init__(self):
        if not self.b_field > 0:
            raise ValueError("field magnitude must be positive")
        if self.i_plus < 0 or self.i_minus < 0 or self.j_action < 0:
            raise ValueError("actions must be nonnegative")
        if self.phi_loop.dim != 2:
            raise ValueError("phi_loop must be the circle embedding (cos, sin)")
        if self.x_loop.dim != 3:
            raise ValueError("x_loop must carry the triple (X, Y, Z)")
        if self.phi_loop.n_segments != self.x_loop.n_segments:
            raise ValueError("phi_loop and x_loop must share their sampling")
        if abs(self.phi_loop.period - self.x_loop.period) > 1e-12 * self.x_loop.period:
            raise ValueError("phi_loop and x_loop must share their period")


@dataclass(frozen=True)
class CoupledGHOHybrid:
    """A quantum generalized oscillator coupled to a classical one, with both
    parameter triples driven by the standard periodic family."""

    params: StandardLoopParams
