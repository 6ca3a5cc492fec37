"""Closed-form amplitudes, bounds and asymptotes for ordered chains.

Covers the three exactly solvable situations the simulator is checked
against: the infinite ordered chain launched from the origin, the ordered
semi-infinite chain launched from its end site, and the delta-emission model
of a finite disordered core leaking into ordered leads.  Infinite sums are
truncated at |x| <= ceil(2t) + TRUNCATION_PAD, past the superexponential
falloff of the wavefront.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_row, bessel_rows
from .propagator import WaveState

# Sites kept past the |x| = 2t wavefront when truncating infinite sums;
# drives truncation error below 1e-12 for t up to ~1e4.
TRUNCATION_PAD = 60

# Powers of (-i) indexed by x mod 4.
_PHASES = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)


def _phase(x: int) -> complex:
    return _PHASES[x % 4]


@dataclass(frozen=True)
class EmissionModel:
    """Single delta-pulse emission from a disordered core of half-width L.

    An excitation of amplitude beta leaves the region at time tau into each
    ordered lead; the residual origin amplitude is gamma_mag * sqrt(1 -
    2|beta|^2), so |beta| <= 1/sqrt(2) keeps the retained probability
    nonnegative.
    """

    beta: complex = 0.0
    tau: float = 0.0
    gamma_mag: float = 1.0
    half_width: int = 0

    def __post_init__(self):
        if abs(self.beta) > 1.0 / math.sqrt(2.0) + 1e-12:
            raise ValueError(f"need |beta| <= 1/sqrt(2), got |beta| = {abs(self.beta)}")
        if self.tau < 0.0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if not 0.0 <= self.gamma_mag <= 1.0:
            raise ValueError(f"gamma_mag must be in [0, 1], got {self.gamma_mag}")
        if self.half_width < 0:
            raise ValueError(f"half_width must be >= 0, got {self.half_width}")

    @property
    def retained(self) -> float:
        """sqrt(1 - 2|beta|^2), the origin-amplitude suppression factor."""
        return math.sqrt(max(1.0 - 2.0 * abs(self.beta) ** 2, 0.0))


def infinite_amplitude(x: int, t: float) -> complex:
    """Amplitude (-i)^x J_x(2t) at signed offset x on the infinite ordered chain."""
    return _phase(x) * bessel_j(x, 2.0 * t)


def infinite_state(t: float, pad: int = TRUNCATION_PAD) -> WaveState:
    """The infinite-chain profile at time t as a finite WaveState.

    The chain is truncated at |x| <= ceil(2t) + pad around the origin, where
    the discarded tail is below double precision.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    radius = math.ceil(2.0 * t) + pad
    row = bessel_row(radius, 2.0 * t).values
    amplitudes = np.empty(2 * radius + 1, dtype=complex)
    phases = np.array([_phase(x) for x in range(radius + 1)])
    right = phases * row
    amplitudes[radius:] = right
    # (-i)^(-x) J_(-x) = (-i)^x J_x: the profile is exactly mirror symmetric.
    amplitudes[:radius] = right[1:][::-1]
    return WaveState(amplitudes=amplitudes, time=t, origin=radius)


def semi_infinite_amplitude(x: int, t: float) -> complex:
    """Amplitude (-i)^x (x+1)/t J_{x+1}(2t) on a half-chain launched from its end x=0."""
    if x < 0:
        raise ValueError(f"half-chain offsets start at 0, got x = {x}")
    if t == 0.0:
        return 1.0 + 0.0j if x == 0 else 0.0j
    return _phase(x) * (x + 1) / t * bessel_j(x + 1, 2.0 * t)


def emission_amplitude(x: int, t: float, model: EmissionModel) -> complex:
    """Lead amplitude beta (-i)^(x-1) x/(t-tau) J_x(2(t-tau)) at offset x >= 1 past the interface."""
    if x < 1:
        raise ValueError(f"emission offsets start at 1, got x = {x}")
    if t <= model.tau:
        return 0.0j
    u = t - model.tau
    return model.beta * _phase(x - 1) * x / u * bessel_j(x, 2.0 * u)


def emission_magnitude_profile(x: int, elapsed: np.ndarray) -> np.ndarray:
    """|x/u J_x(2u)| for an array of elapsed times u = t - tau (unit beta).

    Vectorized helper for emission fitting; entries with u <= 0 are 0.  Tiny
    positive u are closed out by the series limit x u^(x-1) / x! to avoid the
    0/0 at the interface.
    """
    if x < 1:
        raise ValueError(f"emission offsets start at 1, got x = {x}")
    u = np.asarray(elapsed, dtype=float)
    out = np.zeros_like(u)
    tiny = (u > 0.0) & (u < 1e-12)
    if np.any(tiny):
        out[tiny] = x * u[tiny] ** (x - 1) / math.factorial(x)
    live = u >= 1e-12
    if np.any(live):
        rows = bessel_rows(x, 2.0 * u[live])
        out[live] = np.abs(x / u[live] * rows[:, x])
    return out


def w_bounds_ordered(t: float) -> tuple[float, float]:
    """(2t^2, 16/sqrt(pi) t^(5/2)): rigorous lower and asymptotic upper bound on W(t).

    The upper member is meaningful for t >= 1 and is checked downstream only
    for t >= 5.
    """
    return 2.0 * t * t, 16.0 / math.sqrt(math.pi) * t ** 2.5


def asymptotes_ordered(t: float) -> tuple[float, float]:
    """Oscillation-averaged large-t laws (W, M) = (32/(3 pi^1.5) t^2.5, 128/(3 pi^3) t^2)."""
    if t <= 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    w_avg = 32.0 / (3.0 * math.pi ** 1.5) * t ** 2.5
    m_avg = 128.0 / (3.0 * math.pi ** 3) * t * t
    return w_avg, m_avg


def m_o_asymptote(t: float, model: EmissionModel, full: bool = False) -> float:
    """Ordered-lead moment 32 |beta gamma| sqrt(1-2|beta|^2) / pi^1.5 (t-tau)^2.5.

    With full=True the subleading polynomial (in T = t - tau, for a core of
    half-width L) is kept:

        4 |beta gamma| sqrt(1-2|beta|^2) / (T^1.5 pi^1.5) *
        (8 T^4 + (32L/3 - 8) T^3 + (4L^2 - 8L + 3) T^2
         + (4L - 2 - 2L^2) T - (18 + 16L/3 + 2L^2))

    which is an asymptotic intermediate: trustworthy for T >> 1 only and
    negative near T = 0.
    """
    if t <= model.tau:
        raise ValueError(f"need t > tau, got t = {t}, tau = {model.tau}")
    big_t = t - model.tau
    front = abs(model.beta) * model.gamma_mag * model.retained
    if not full:
        return 32.0 * front / math.pi ** 1.5 * big_t ** 2.5
    ell = model.half_width
    poly = (
        8.0 * big_t**4
        + (32.0 * ell / 3.0 - 8.0) * big_t**3
        + (4.0 * ell**2 - 8.0 * ell + 3.0) * big_t**2
        + (4.0 * ell - 2.0 - 2.0 * ell**2) * big_t
        - (18.0 + 16.0 * ell / 3.0 + 2.0 * ell**2)
    )
    return 4.0 * front / (big_t**1.5 * math.pi**1.5) * poly


def m_d_bound(model: EmissionModel) -> float:
    """Cap 4 |gamma| sqrt(1-2|beta|^2) L^2 on the disordered-region moment."""
    return 4.0 * model.gamma_mag * model.retained * model.half_width**2


def wavefront_approximation(x: int, z: float) -> float:
    """Traveling-wave form sqrt(2/(pi z)) cos(z - x pi/2 - pi/4) inside the light cone.

    Returns 0 outside |x| <= z, where J_x(z) is superexponentially small.
    """
    if z <= 0.0:
        raise ValueError(f"z must be > 0, got {z}")
    if abs(x) > z:
        return 0.0
    return math.sqrt(2.0 / (math.pi * z)) * math.cos(z - x * math.pi / 2.0 - math.pi / 4.0)
