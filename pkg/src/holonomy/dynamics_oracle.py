"""Independent time-domain validators: adiabatic Schrodinger propagation with
geometric-phase extraction, and integration of the driven classical
oscillator with angle-shift extraction.

Both propagators use a fixed-step classical fourth-order one-step method on a
time-dilated traversal of the loop; parameter values between samples come
from spectral upsampling, consistent with the band-limited loops used
everywhere else.  Determinism of step placement makes convergence studies
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EllipticViolation,
    GapTooSmall,
    NonAdiabatic,
    OverlapTooSmall,
)
from .manifold import LoopSpec
from .quantum_geometry import HamiltonianFamily, canonical_section_track

TWO_PI = 2.0 * math.pi

_ADIABATIC_FIDELITY = 0.99


@dataclass(frozen=True)
class QuantumPropagation:
    """Result of one adiabatic Schrodinger run around a loop."""

    psi_initial: np.ndarray
    psi_final: np.ndarray
    dynamical_phase: float
    norm_drift: float
    slowness: float
    level: int
    phase_track: np.ndarray
    final_fidelity: float


@dataclass(frozen=True)
class ClassicalTrajectory:
    """Result of one driven-oscillator run around a loop."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    action_trace: np.ndarray
    angle_trace: np.ndarray
    dynamical_angle: float
    slowness: float

    @property
    def action_drift(self) -> float:
        j0 = self.action_trace[0]
        return float(np.max(np.abs(self.action_trace / j0 - 1.0)))


def recommended_steps_per_sample(loop: LoopSpec, slowness: float, rate_scale: float = 1.0) -> int:
    """Steps per loop sample keeping the integrator error well under the
    adiabatic error at the given slowness (dilated step ~ 0.7/sqrt(slowness)
    in units of the characteristic rate)."""
    target = 0.7 / (rate_scale * math.sqrt(slowness))
    return max(8, int(math.ceil(slowness * loop.spacing / target)))


def _upsample_columns(points: np.ndarray, factor: int) -> np.ndarray:
    """Spectral upsample of closed-loop samples (first M rows, no endpoint)."""
    x = points[:-1]
    m = x.shape[0]
    coef = np.fft.fft(x, axis=0)
    big = np.zeros((m * factor, x.shape[1]), dtype=complex)
    pos = (m + 1) // 2  # nonnegative-frequency block
    big[:pos] = coef[:pos]
    big[m * factor - (m - pos):] = coef[pos:]
    if m % 2 == 0:
        # split the Nyquist mode symmetrically to keep the signal real
        big[m // 2] = 0.5 * coef[m // 2]
        big[m * factor - m // 2] = 0.5 * coef[m // 2]
    return np.real(np.fft.ifft(big, axis=0)) * factor


def _wrap_angle(x: np.ndarray) -> np.ndarray:
    return (x + math.pi) % TWO_PI - math.pi


def propagate_quantum(
    family: HamiltonianFamily,
    loop: LoopSpec,
    k: int,
    slowness: float,
    steps_per_sample: int = 32,
    hbar: float = 1.0,
) -> QuantumPropagation:
    """Integrate the Schrodinger equation while the parameters traverse the
    loop once over a total time of slowness * period.

    The state starts in level ``k``'s eigenvector (canonical gauge) and is
    renormalized each step; the discarded norm excess accumulates into
    ``norm_drift``.  The dynamical phase is the trapezoid of the tracked
    level's energy over the full step grid.  ``phase_track`` holds, at every
    loop sample, the state's phase relative to the canonical eigenvector plus
    the dynamical phase accumulated so far; its unwrapped increments survive
    many windings and feed ``extract_geometric_phase``.
    """
    if not 0 <= k < family.dim:
        raise IndexError(f"level {k} out of range")
    if slowness <= 0 or steps_per_sample < 1:
        raise ValueError("slowness must be positive and steps_per_sample at least 1")
    m = loop.n_segments
    n_steps = m * steps_per_sample
    h = slowness * loop.period / n_steps

    fine = _upsample_columns(loop.points, 2 * steps_per_sample)  # 2 points per step
    mats = family.matrices(fine)
    energies_fine = np.linalg.eigvalsh(mats[::2])  # one per full step
    if family.dim > 1:
        gaps = np.diff(energies_fine, axis=1)
        scale = float(np.max(np.abs(energies_fine)))
        tol = 1e-9 * max(scale, 1e-300)
        if float(np.min(gaps)) < tol:
            j, lv = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
            raise GapTooSmall(sample=int(j), level=int(lv), gap=float(np.min(gaps)), tol=tol)

    # reference eigenvectors at the loop samples, canonical-section gauge
    sample_mats = family.matrices(loop.points)
    _, sample_vecs = np.linalg.eigh(sample_mats)
    canon = canonical_section_track(sample_vecs[:, :, k])
    if canon is None:
        # no usable pivot: fall back to transport-aligned references
        refs = sample_vecs[:, :, k].copy()
        for j in range(1, refs.shape[0]):
            ov = np.vdot(refs[j - 1], refs[j])
            refs[j] *= np.conj(ov / abs(ov))
    else:
        refs, _ = canon

    gen = mats * (-1j / hbar)  # dpsi/dtau = gen(tau) psi
    e_level = energies_fine[:, k]

    psi = refs[0].astype(complex).copy()
    psi_initial = psi.copy()
    norm_drift = 0.0
    dyn = 0.0
    track = np.empty(m + 1)
    track[0] = float(np.angle(np.vdot(refs[0], psi)))

    two_n = 2 * n_steps
    use_fast = family.dim == 2
    if use_fast:
        a00 = gen[:, 0, 0].tolist()
        a01 = gen[:, 0, 1].tolist()
        a10 = gen[:, 1, 0].tolist()
        a11 = gen[:, 1, 1].tolist()
        x0 = complex(psi[0])
        x1 = complex(psi[1])
        h6 = h / 6.0
        h2 = h / 2.0
        for i in range(n_steps):
            i0 = 2 * i
            i1 = i0 + 1
            i2 = (i0 + 2) % two_n
            k1a = a00[i0] * x0 + a01[i0] * x1
            k1b = a10[i0] * x0 + a11[i0] * x1
            ya = x0 + h2 * k1a
            yb = x1 + h2 * k1b
            k2a = a00[i1] * ya + a01[i1] * yb
            k2b = a10[i1] * ya + a11[i1] * yb
            ya = x0 + h2 * k2a
            yb = x1 + h2 * k2b
            k3a = a00[i1] * ya + a01[i1] * yb
            k3b = a10[i1] * ya + a11[i1] * yb
            ya = x0 + h * k3a
            yb = x1 + h * k3b
            k4a = a00[i2] * ya + a01[i2] * yb
            k4b = a10[i2] * ya + a11[i2] * yb
            x0 = x0 + h6 * (k1a + 2.0 * (k2a + k3a) + k4a)
            x1 = x1 + h6 * (k1b + 2.0 * (k2b + k3b) + k4b)
            nrm = math.sqrt(
                x0.real * x0.real + x0.imag * x0.imag + x1.real * x1.real + x1.imag * x1.imag
            )
            norm_drift += abs(nrm - 1.0)
            x0 /= nrm
            x1 /= nrm
            dyn += h2 / hbar * (e_level[i] + e_level[(i + 1) % n_steps])
            if (i + 1) % steps_per_sample == 0:
                j = (i + 1) // steps_per_sample
                ref = refs[j]
                ov = np.conj(ref[0]) * x0 + np.conj(ref[1]) * x1
                track[j] = float(np.angle(ov)) + dyn
        psi = np.array([x0, x1])
    else:
        for i in range(n_steps):
            i0 = 2 * i
            i1 = i0 + 1
            i2 = (i0 + 2) % two_n
            k1 = gen[i0] @ psi
            k2 = gen[i1] @ (psi + 0.5 * h * k1)
            k3 = gen[i1] @ (psi + 0.5 * h * k2)
            k4 = gen[i2] @ (psi + h * k3)
            psi = psi + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            nrm = float(np.linalg.norm(psi))
            norm_drift += abs(nrm - 1.0)
            psi /= nrm
            dyn += 0.5 * h / hbar * (e_level[i] + e_level[(i + 1) % n_steps])
            if (i + 1) % steps_per_sample == 0:
                j = (i + 1) // steps_per_sample
                track[j] = float(np.angle(np.vdot(refs[j], psi))) + dyn

    fidelity = float(abs(np.vdot(refs[-1], psi)) ** 2)
    if fidelity < _ADIABATIC_FIDELITY:
        raise NonAdiabatic(
            f"final level fidelity {fidelity:.4f} below {_ADIABATIC_FIDELITY}; "
            f"increase the slowness"
        )
    return QuantumPropagation(
        psi_initial=psi_initial,
        psi_final=psi,
        dynamical_phase=dyn,
        norm_drift=norm_drift,
        slowness=slowness,
        level=k,
        phase_track=track,
        final_fidelity=fidelity,
    )


def extract_geometric_phase(prop: QuantumPropagation, initial_state: np.ndarray) -> float:
    """Total phase minus dynamical phase, unwound across multiples of 2*pi.

    The per-sample increments of the propagation's phase track are small in
    the adiabatic regime, so summing their wrapped values preserves windings
    that a single final overlap would fold back into (-pi, pi].
    """
    initial_state = np.asarray(initial_state, dtype=complex)
    overlap = abs(np.vdot(initial_state, prop.psi_final))
    if overlap <= 0.9:
        raise OverlapTooSmall(f"|<initial|final>| = {overlap:.4f} is at or below 0.9")
    base = float(np.angle(np.vdot(initial_state, prop.psi_initial)))
    increments = _wrap_angle(np.diff(prop.phase_track))
    return base + float(prop.phase_track[0]) + float(np.sum(increments))


def action_angle_to_qp(triple: np.ndarray, j_action: float, phi: float) -> tuple[float, float]:
    """Oscillator coordinates for action ``j_action`` and angle ``phi`` at
    frozen parameters (X, Y, Z)."""
    x, y, z = (float(v) for v in triple)
    w_sq = x * z - y**2
    if not w_sq > 0:
        raise EllipticViolation(f"frequency squared {w_sq:.3e} is not positive")
    w = math.sqrt(w_sq)
    amp = math.sqrt(2.0 * z * j_action / w)
    q = amp * math.cos(phi)
    p = -amp * ((y / z) * math.cos(phi) + (w / z) * math.sin(phi))
    return q, p


def propagate_classical(
    x2_loop: LoopSpec,
    initial_qp: tuple[float, float],
    slowness: float,
    steps_per_sample: int = 32,
) -> ClassicalTrajectory:
    """Integrate dQ/dt = Y Q + Z P, dP/dt = -X Q - Y P while the triple
    traverses the loop once over slowness * period.

    The action and angle traces come from inverting the elliptic
    action-angle transform at the frozen instantaneous parameters after every
    step; the angle trace is unwound continuously.  The dynamical angle is
    the trapezoid of the instantaneous frequency over the run.
    """
    if x2_loop.dim != 3:
        raise ValueError("expected a loop of oscillator triples (X, Y, Z)")
    if slowness <= 0 or steps_per_sample < 1:
        raise ValueError("slowness must be positive and steps_per_sample at least 1")
    m = x2_loop.n_segments
    n_steps = m * steps_per_sample
    h = slowness * x2_loop.period / n_steps

    fine = _upsample_columns(x2_loop.points, 2 * steps_per_sample)
    w_sq_fine = fine[:, 0] * fine[:, 2] - fine[:, 1] ** 2
    if np.any(w_sq_fine <= 0):
        j = int(np.argmax(w_sq_fine <= 0))
        raise EllipticViolation(f"frequency squared vanished between samples ({j})", sample=j)

    xs = fine[:, 0].tolist()
    ys = fine[:, 1].tolist()
    zs = fine[:, 2].tolist()
    omega_full = np.sqrt(w_sq_fine[::2])

    q, p = (float(initial_qp[0]), float(initial_qp[1]))
    times = np.empty(n_steps + 1)
    qs = np.empty(n_steps + 1)
    ps = np.empty(n_steps + 1)
    actions = np.empty(n_steps + 1)
    angles = np.empty(n_steps + 1)

    def record(i_step: int, qv: float, pv: float) -> None:
        idx = (2 * i_step) % (2 * n_steps)
        _, y, z = fine[idx]
        w = omega_full[i_step % n_steps]
        u = qv
        v = -(z * pv + y * qv) / w
        actions[i_step] = w * (u * u + v * v) / (2.0 * z)
        raw = math.atan2(v, u)
        if i_step == 0:
            angles[0] = raw
        else:
            prev = angles[i_step - 1]
            angles[i_step] = prev + (raw - prev + math.pi) % TWO_PI - math.pi
        times[i_step] = i_step * h
        qs[i_step] = qv
        ps[i_step] = pv

    record(0, q, p)
    h2 = h / 2.0
    h6 = h / 6.0
    two_n = 2 * n_steps
    for i in range(n_steps):
        i0 = 2 * i
        i1 = i0 + 1
        i2 = (i0 + 2) % two_n
        x, y, z = xs[i0], ys[i0], zs[i0]
        k1q = y * q + z * p
        k1p = -x * q - y * p
        x, y, z = xs[i1], ys[i1], zs[i1]
        aq = q + h2 * k1q
        ap = p + h2 * k1p
        k2q = y * aq + z * ap
        k2p = -x * aq - y * ap
        aq = q + h2 * k2q
        ap = p + h2 * k2p
        k3q = y * aq + z * ap
        k3p = -x * aq - y * ap
        x, y, z = xs[i2], ys[i2], zs[i2]
        aq = q + h * k3q
        ap = p + h * k3p
        k4q = y * aq + z * ap
        k4p = -x * aq - y * ap
        q = q + h6 * (k1q + 2.0 * (k2q + k3q) + k4q)
        p = p + h6 * (k1p + 2.0 * (k2p + k3p) + k4p)
        record(i + 1, q, p)

    omega_closed = np.append(omega_full, omega_full[0])
    dyn = float(h * (0.5 * omega_closed[0] + np.sum(omega_closed[1:-1]) + 0.5 * omega_closed[-1]))
    return ClassicalTrajectory(
        times=times,
        q=qs,
        p=ps,
        action_trace=actions,
        angle_trace=angles,
        dynamical_angle=dyn,
        slowness=slowness,
    )


def extract_hannay_angle(traj: ClassicalTrajectory) -> float:
    """Angle advance beyond the dynamical integral of the instantaneous
    frequency over exactly one loop traversal."""
    return float(traj.angle_trace[-1] - traj.angle_trace[0] - traj.dynamical_angle)
