"""Closed parameter loops, the standard periodic parameter family, and
spectrally accurate closed-curve quadrature.

Loops are uniformly sampled closed curves.  Line integrals are evaluated by
differentiating the curve spectrally (the samples are periodic) and applying
the composite trapezoid rule in the loop parameter, which is exact for
band-limited curves and converges faster than any power of the sample count
for smooth ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EllipticViolation, LengthMismatch, NotClosed, TooFewSamples

DEFAULT_SAMPLES = 4096

_MIN_SEGMENTS = 16
_CLOSURE_RTOL = 1e-12


def _closure_ok(x0: np.ndarray, x1: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(x0))), float(np.max(np.abs(x1))))
    return bool(np.all(np.abs(np.asarray(x1) - np.asarray(x0)) <= _CLOSURE_RTOL * scale))


@dataclass(frozen=True)
class LoopSpec:
    """A sampled closed curve in parameter space.

    ``times`` runs from 0 to ``period`` inclusive on a uniform grid, and the
    last point must coincide with the first (relative tolerance 1e-12).
    ``cycles`` records how many base cycles the curve contains; phase
    computations use it for branch bookkeeping on multi-cycle loops.
    """

    period: float
    times: np.ndarray
    points: np.ndarray
    cycles: int = 1

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if times.ndim != 1 or points.shape[0] != times.shape[0]:
            raise LengthMismatch(
                f"times has {times.shape[0]} entries, points has {points.shape[0]} rows"
            )
        if times.shape[0] - 1 < _MIN_SEGMENTS:
            raise TooFewSamples(
                f"need at least {_MIN_SEGMENTS} segments, got {times.shape[0] - 1}"
            )
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ValueError(f"period must be positive and finite, got {self.period}")
        if abs(times[0]) > 1e-15 * self.period:
            raise ValueError("first sample time must be 0")
        if abs(times[-1] - self.period) > 1e-12 * self.period:
            raise ValueError("last sample time must equal the period")
        if np.any(np.diff(times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if not _closure_ok(points[0], points[-1]):
            raise NotClosed("loop endpoint does not return to its start")
        if not (isinstance(self.cycles, int) and self.cycles >= 1):
            raise ValueError(f"cycles must be a positive integer, got {self.cycles}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_segments(self) -> int:
        return self.times.shape[0] - 1

    @property
    def spacing(self) -> float:
        return self.period / self.n_segments

    @property
    def is_uniform(self) -> bool:
        dt = np.diff(self.times)
        return bool(np.max(np.abs(dt - self.spacing)) <= 1e-9 * self.spacing)

    def reversed(self) -> "LoopSpec":
        """The same curve traversed in the opposite orientation."""
        return LoopSpec(self.period, self.times, self.points[::-1].copy(), self.cycles)


@dataclass(frozen=True)
class QuadratureResult:
    """A quadrature value with an error estimate from resolution halving."""

    value: float
    error_estimate: float

    def __post_init__(self):
        if not (self.error_estimate >= 0.0):
            raise ValueError("error estimate must be nonnegative")


def make_loop(
    f: Callable[[float], np.ndarray],
    period: float,
    n_samples: int,
    cycles: int = 1,
) -> LoopSpec:
    """Sample ``f`` uniformly on ``[0, period]`` into a closed loop.

    ``f(0)`` and ``f(period)`` must agree to relative 1e-12; raises
    ``NotClosed`` otherwise and ``TooFewSamples`` below 16 segments.
    """
    if n_samples < _MIN_SEGMENTS:
        raise TooFewSamples(f"n_samples must be at least {_MIN_SEGMENTS}, got {n_samples}")
    if period <= 0:
        raise ValueError("period must be positive")
    x0 = np.atleast_1d(np.asarray(f(0.0), dtype=float))
    x_end = np.atleast_1d(np.asarray(f(period), dtype=float))
    if not _closure_ok(x0, x_end):
        raise NotClosed("f(0) and f(period) differ beyond the closure tolerance")
    times = np.linspace(0.0, period, n_samples + 1)
    points = np.empty((n_samples + 1, x0.shape[0]))
    points[0] = x0
    points[-1] = x_end
    for j in range(1, n_samples):
        points[j] = np.atleast_1d(np.asarray(f(times[j]), dtype=float))
    return LoopSpec(period=period, times=times, points=points, cycles=cycles)


def circle_loop(
    period: float = 1.0,
    n_samples: int = DEFAULT_SAMPLES,
    cycles: int = 1,
    phase: float = 0.0,
    radius: float = 1.0,
) -> LoopSpec:
    """A circle in the plane, embedded as (cos, sin); used for angle-like axes."""
    w = 2.0 * math.pi * cycles / period
    times = np.linspace(0.0, period, n_samples + 1)
    ang = w * times + phase
    pts = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    pts[-1] = pts[0]
    return LoopSpec(period=period, times=times, points=pts, cycles=cycles)


def _spectral_velocity(points: np.ndarray, period: float) -> np.ndarray:
    """d(points)/dt at the first M samples via FFT differentiation."""
    m = points.shape[0] - 1
    x = points[:-1]
    freqs = 2.0 * math.pi * np.fft.fftfreq(m, d=period / m)
    coef = np.fft.fft(x, axis=0) * (1j * freqs)[:, None]
    if m % 2 == 0:
        coef[m // 2] = 0.0  # unpaired Nyquist mode carries no derivative
    return np.real(np.fft.ifft(coef, axis=0))


def _line_integral_value(coeffs: np.ndarray, points: np.ndarray, period: float) -> float:
    m = points.shape[0] - 1
    vel = _spectral_velocity(points, period)
    g = np.einsum("jd,jd->j", coeffs[:-1], vel)
    g_close = float(coeffs[-1] @ vel[0])
    dt = period / m
    return float(dt * (0.5 * g[0] + np.sum(g[1:]) + 0.5 * g_close))


def _chord_integral_value(coeffs: np.ndarray, points: np.ndarray) -> float:
    dx = np.diff(points, axis=0)
    mid = 0.5 * (coeffs[:-1] + coeffs[1:])
    return float(np.einsum("jd,jd->", mid, dx))


def closed_line_integral(coefficients: np.ndarray, loop: LoopSpec) -> QuadratureResult:
    """Evaluate the circulation of a sampled covector field around the loop.

    ``coefficients[j]`` is the covector at ``loop.points[j]``; the result is
    the closed line integral of coefficients . dx.  The error estimate is the
    difference against a stride-2 subsample of the same data.
    """
    c = np.asarray(coefficients, dtype=float)
    if c.ndim == 1:
        c = c[:, None]
    if c.shape != loop.points.shape:
        raise LengthMismatch(
            f"coefficients shape {c.shape} does not match loop samples {loop.points.shape}"
        )
    if not loop.is_uniform:
        raise ValueError("the quadrature rule requires uniformly spaced samples")
    value = _line_integral_value(c, loop.points, loop.period)
    m = loop.n_segments
    if m % 2 == 0 and m >= 2 * _MIN_SEGMENTS:
        half = _line_integral_value(c[::2], loop.points[::2], loop.period)
    else:
        half = _chord_integral_value(c, loop.points)
    return QuadratureResult(value=value, error_estimate=abs(value - half))


def periodic_integral(values: np.ndarray, period: float) -> QuadratureResult:
    """Trapezoid integral of a periodic function sampled on a closed uniform grid.

    ``values`` includes both endpoints (t = 0 and t = period).
    """
    v = np.asarray(values, dtype=float)
    m = v.shape[0] - 1
    if m < _MIN_SEGMENTS:
        raise TooFewSamples(f"need at least {_MIN_SEGMENTS} segments, got {m}")
    dt = period / m
    value = float(dt * (0.5 * v[0] + np.sum(v[1:-1]) + 0.5 * v[-1]))
    if m % 2 == 0 and m >= 2 * _MIN_SEGMENTS:
        v2 = v[::2]
        half = float(2 * dt * (0.5 * v2[0] + np.sum(v2[1:-1]) + 0.5 * v2[-1]))
    else:
        half = value
    return QuadratureResult(value=value, error_estimate=abs(value - half))


@dataclass(frozen=True)
class StandardLoopParams:
    """The periodic parameter family driving both generalized oscillators.

    Subsystem i follows X_i = a_i*mu_i*(1 + eps*cos(w_i t)),
    Y_i = -a_i*eps*sin(w_i t), Z_i = (a_i/mu_i)*(1 - eps*cos(w_i t)) with
    w_i = n_i * base_rate.  Keeping the frequencies an explicit reduced
    integer pair times one base rate makes the common period structural.
    """

    a1: float
    a2: float
    mu1: float
    mu2: float
    n1: int
    n2: int
    base_rate: float
    epsilon: float
    k: float = 0.0
    j_action: float = 1.0
    hbar: float = 1.0
    n_level: int = 0

    def __post_init__(self):
        for name in ("a1", "a2", "mu1", "mu2", "base_rate", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (isinstance(self.n1, int) and isinstance(self.n2, int)):
            raise ValueError("frequency multipliers must be integers")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("frequency multipliers must be positive")
        if math.gcd(self.n1, self.n2) != 1:
            raise ValueError(f"(n1, n2)=({self.n1}, {self.n2}) must be a reduced pair")
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.k < 0:
            raise ValueError("coupling k must be nonnegative")
        if self.j_action < 0:
            raise ValueError("j_action must be nonnegative")
        if self.n_level < 0:
            raise ValueError("n_level must be nonnegative")

    @property
    def omega1(self) -> float:
        return self.n1 * self.base_rate

    @property
    def omega2(self) -> float:
        return self.n2 * self.base_rate

    @property
    def common_period(self) -> float:
        return 2.0 * math.pi / self.base_rate

    @property
    def d_ratio(self) -> float:
        """Dimensionless coupling strength built from k and the drive scales."""
        return self.k / math.sqrt(
            2.0 * self.mu1 * self.mu2 * self.a1 * self.a2 * (1.0 - self.epsilon**2)
        )

    @property
    def elliptic_margin(self) -> float:
        """Worst-case margin of the effective-frequency positivity condition."""
        return 1.0 - self.epsilon**2 - 2.0 * self.d_ratio**2 * (1.0 + self.epsilon) ** 2

    def require_elliptic(self) -> None:
        if not self.elliptic_margin > 0.0:
            raise EllipticViolation(
                f"elliptic condition violated: margin {self.elliptic_margin:.3e} "
                f"at coupling k={self.k}"
            )


def _gho_triple(a: float, mu: float, eps: float, omega: float, t: np.ndarray):
    c = eps * np.cos(omega * t)
    s = eps * np.sin(omega * t)
    return a * mu * (1.0 + c), -a * s, (a / mu) * (1.0 - c)


def standard_parameter_loops(
    p: StandardLoopParams, n_samples: int = DEFAULT_SAMPLES
) -> tuple[LoopSpec, LoopSpec]:
    """Both parameter loops over the common period.

    Loop i contains n_i base cycles, so the pair is synchronized for
    coupled-phase quadrature.
    """
    t = np.linspace(0.0, p.common_period, n_samples + 1)
    x1, y1, z1 = _gho_triple(p.a1, p.mu1, p.epsilon, p.omega1, t)
    x2, y2, z2 = _gho_triple(p.a2, p.mu2, p.epsilon, p.omega2, t)
    pts1 = np.column_stack([x1, y1, z1])
    pts2 = np.column_stack([x2, y2, z2])
    pts1[-1] = pts1[0]
    pts2[-1] = pts2[0]
    loop1 = LoopSpec(p.common_period, t, pts1, cycles=p.n1)
    loop2 = LoopSpec(p.common_period, t, pts2, cycles=p.n2)
    return loop1, loop2


def subsystem_parameter_loop(
    p: StandardLoopParams, subsystem: int, n_samples: int = DEFAULT_SAMPLES
) -> LoopSpec:
    """One cycle of a single subsystem's parameter triple over its own period."""
    if subsystem == 1:
        a, mu, omega = p.a1, p.mu1, p.omega1
    elif subsystem == 2:
        a, mu, omega = p.a2, p.mu2, p.omega2
    else:
        raise ValueError("subsystem must be 1 or 2")
    period = 2.0 * math.pi / omega
    t = np.linspace(0.0, period, n_samples + 1)
    x, y, z = _gho_triple(a, mu, p.epsilon, omega, t)
    pts = np.column_stack([x, y, z])
    pts[-1] = pts[0]
    return LoopSpec(period, t, pts, cycles=1)


def combined_parameter_loop(
    p: StandardLoopParams, n_samples: int = DEFAULT_SAMPLES
) -> LoopSpec:
    """Both triples concatenated into one 6-dimensional common-period loop."""
    loop1, loop2 = standard_parameter_loops(p, n_samples)
    pts = np.hstack([loop1.points, loop2.points])
    return LoopSpec(p.common_period, loop1.times, pts, cycles=1)
