"""Time-series analytics for moment curves.

The raw moment of concurrence oscillates hard (the origin amplitude passes
through zeros), so exponent work always goes through a centered moving
average first; the default window of pi spans at least two full oscillation
periods.  Power laws are fitted by ordinary least squares in log-log space,
and the delta-emission model is fitted by profiling: the emission amplitude
enters linearly, so each candidate release time has a closed-form amplitude,
and the release time itself is found by a grid scan plus golden-section
refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import EmissionModel, emission_magnitude_profile, w_bounds_ordered
from .observables import MomentSample

AVERAGE_WINDOW_DEFAULT = math.pi

# Upper-bound checks only apply where the asymptotic form is meaningful.
UPPER_BOUND_MIN_TIME = 5.0

_FIELDS = ("m", "w", "alpha0_abs", "m_o", "m_d", "norm_error")
FIT_FIELDS = ("m", "w")


@dataclass(frozen=True)
class MomentSeries:
    """Time-ordered moment rows plus an identifier of what generated them."""

    samples: tuple[MomentSample, ...]
    spec_digest: str = ""

    def __post_init__(self):
        times = [s.time for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        if name not in _FIELDS:
            raise ValueError(f"unknown column {name!r}, expected one of {_FIELDS}")
        return np.array([getattr(s, name) for s in self.samples])


def series_from_samples(samples, spec_digest: str = "") -> MomentSeries:
    return MomentSeries(samples=tuple(samples), spec_digest=spec_digest)


@dataclass(frozen=True)
class PowerLawFit:
    """m(t) ~ prefactor * t^exponent over the fit window, with log-log residual."""

    exponent: float
    prefactor: float
    window: tuple[float, float]
    rms_residual: float


def time_average(series: MomentSeries, window_width: float = AVERAGE_WINDOW_DEFAULT) -> MomentSeries:
    """Centered moving average of every field; half-window margins are trimmed.

    Output rows keep their original sample times.  The averaged rows are
    smoothed summaries: the exact product identity m = 2 alpha0 w holds only
    for raw rows.
    """
    if len(series) == 0:
        raise ValueError("cannot average an empty series")
    if window_width <= 0.0:
        raise ValueError(f"window_width must be > 0, got {window_width}")
    times = series.times()
    if len(series) > 1:
        mean_spacing = (times[-1] - times[0]) / (len(times) - 1)
        if window_width < 2.0 * mean_spacing:
            raise ValueError(
                f"window {window_width:g} holds fewer than 2 samples on average "
                f"(mean spacing {mean_spacing:g})"
            )

    half = 0.5 * window_width
    lo = np.searchsorted(times, times - half, side="left")
    hi = np.searchsorted(times, times + half, side="right")
    keep = (times >= times[0] + half) & (times <= times[-1] - half)
    if not np.any(keep):
        raise ValueError("window wider than the sampled span, nothing left after trimming")

    counts = (hi - lo)[keep]
    averaged = {}
    for name in _FIELDS:
        col = series.column(name)
        csum = np.concatenate(([0.0], np.cumsum(col)))
        averaged[name] = (csum[hi] - csum[lo])[keep] / counts

    samples = [
        MomentSample(
            time=float(t),
            m=float(averaged["m"][k]),
            w=float(averaged["w"][k]),
            alpha0_abs=float(averaged["alpha0_abs"][k]),
            m_o=float(averaged["m_o"][k]),
            m_d=float(averaged["m_d"][k]),
            norm_error=float(averaged["norm_error"][k]),
        )
        for k, t in enumerate(times[keep])
    ]
    return MomentSeries(samples=tuple(samples), spec_digest=series.spec_digest)


def _fit_window_values(series: MomentSeries, field_name: str, window: tuple[float, float]):
    if field_name not in FIT_FIELDS:
        raise ValueError(f"fit field must be one of {FIT_FIELDS}, got {field_name!r}")
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError(f"need t_lo < t_hi, got window {window}")
    times = series.times()
    mask = (times >= t_lo) & (times <= t_hi)
    if np.count_nonzero(mask) < 2:
        raise ValueError(f"window {window} selects fewer than 2 samples")
    t = times[mask]
    y = series.column(field_name)[mask]
    if np.any(t <= 0.0):
        raise ValueError("window must contain positive times only")
    if np.any(y <= 0.0):
        raise ValueError(f"{field_name} must be positive throughout the window")
    return t, y


def fit_power_law(
    series: MomentSeries, field_name: str, window: tuple[float, float]
) -> PowerLawFit:
    """Least-squares line in log-log space: slope = exponent, exp(intercept) = prefactor."""
    t, y = _fit_window_values(series, field_name, window)
    logt = np.log(t)
    logy = np.log(y)
    slope, intercept = np.polyfit(logt, logy, 1)
    resid = logy - (slope * logt + intercept)
    return PowerLawFit(
        exponent=float(slope),
        prefactor=float(math.exp(intercept)),
        window=(float(window[0]), float(window[1])),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
    )


def local_exponent(series: MomentSeries, field_name: str) -> np.ndarray:
    """Centered d log(field) / d log(t) at interior samples, as rows (t, slope)."""
    if field_name not in FIT_FIELDS:
        raise ValueError(f"fit field must be one of {FIT_FIELDS}, got {field_name!r}")
    times = series.times()
    values = series.column(field_name)
    if len(times) < 3:
        raise ValueError("need at least 3 samples for a centered difference")
    if np.any(times <= 0.0) or np.any(values <= 0.0):
        raise ValueError("local exponent needs positive times and field values")
    logt = np.log(times)
    logy = np.log(values)
    slopes = (logy[2:] - logy[:-2]) / (logt[2:] - logt[:-2])
    return np.column_stack((times[1:-1], slopes))


@dataclass(frozen=True)
class BoundCheck:
    """One sample versus the ordered-chain envelope 2t^2 <= W <= 16/sqrt(pi) t^2.5."""

    time: float
    lower_ok: bool
    upper_ok: bool | None  # None below the asymptotic validity time
    w: float
    lower: float
    upper: float


@dataclass(frozen=True)
class BoundsReport:
    checks: tuple[BoundCheck, ...] = field(default_factory=tuple)

    @property
    def lower_failures(self) -> int:
        return sum(1 for c in self.checks if not c.lower_ok)

    @property
    def upper_failures(self) -> int:
        return sum(1 for c in self.checks if c.upper_ok is False)

    @property
    def upper_checked(self) -> int:
        return sum(1 for c in self.checks if c.upper_ok is not None)

    @property
    def passed(self) -> bool:
        return self.lower_failures == 0 and self.upper_failures == 0


def verify_bounds(series: MomentSeries) -> BoundsReport:
    """Per-sample envelope report for an ordered-chain series.

    The lower inequality gets a -1e-9 tolerance; the upper one is evaluated
    only for t >= 5.  This reports rather than asserts, so corrupt inputs
    come back as failure counts.
    """
    checks = []
    for s in series.samples:
        lower, upper = w_bounds_ordered(s.time)
        upper_ok = bool(s.w <= upper) if s.time >= UPPER_BOUND_MIN_TIME else None
        checks.append(
            BoundCheck(
                time=s.time,
                lower_ok=bool(s.w >= lower - 1e-9),
                upper_ok=upper_ok,
                w=s.w,
                lower=lower,
                upper=upper,
            )
        )
    return BoundsReport(checks=tuple(checks))


def _emission_sse(
    tau: float, times: np.ndarray, amplitudes: np.ndarray, site_offset: int
) -> tuple[float, float]:
    """(sum of squared residuals, best amplitude) for one candidate release time."""
    g = emission_magnitude_profile(site_offset, times - tau)
    gg = float(np.dot(g, g))
    if gg == 0.0:
        return float(np.dot(amplitudes, amplitudes)), 0.0
    beta = max(float(np.dot(amplitudes, g)) / gg, 0.0)
    resid = amplitudes - beta * g
    return float(np.dot(resid, resid)), beta


def fit_emission(
    times: np.ndarray,
    amplitudes: np.ndarray,
    site_offset: int,
    model_init: EmissionModel,
    origin_amplitudes: np.ndarray | None = None,
    tau_grid_points: int = 160,
) -> EmissionModel:
    """Fit (|beta|, tau) of the delta-emission model to |amplitude| data.

    `amplitudes` holds |a(t)| at a fixed small offset past the interface.
    beta enters linearly, so each candidate tau has a closed-form amplitude;
    tau starts on a coarse grid over the trace and is then refined by
    golden-section search on the profiled objective.  Phases of beta and the
    origin factor are unobservable in magnitude data: the returned beta is
    real nonnegative.  When the origin magnitude trace is supplied,
    gamma_mag is set to its time average divided by sqrt(1 - 2 beta^2).
    """
    times = np.asarray(times, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    if times.ndim != 1 or times.shape != amplitudes.shape or times.size < 3:
        raise ValueError("need matching 1-d time/amplitude arrays with >= 3 samples")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be strictly ascending")
    if not np.any(amplitudes > 0.0):
        raise ValueError("amplitude trace is identically zero, nothing to fit")
    if site_offset < 1:
        raise ValueError(f"site_offset must be >= 1, got {site_offset}")

    t_lo, t_hi = float(times[0]), float(times[-1])
    tau_max = max(t_lo, t_hi - 0.1 * (t_hi - t_lo))
    grid = np.linspace(0.0, tau_max, tau_grid_points)
    sse = np.array([_emission_sse(tau, times, amplitudes, site_offset)[0] for tau in grid])
    k = int(np.argmin(sse))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]

    # Golden-section refinement of the profiled objective.
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc = _emission_sse(c, times, amplitudes, site_offset)[0]
    fd = _emission_sse(d, times, amplitudes, site_offset)[0]
    while hi - lo > 1e-10:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = _emission_sse(c, times, amplitudes, site_offset)[0]
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = _emission_sse(d, times, amplitudes, site_offset)[0]
    tau_hat = 0.5 * (lo + hi)
    _, beta_hat = _emission_sse(tau_hat, times, amplitudes, site_offset)

    gamma = model_init.gamma_mag
    if origin_amplitudes is not None:
        origin_amplitudes = np.asarray(origin_amplitudes, dtype=float)
        if origin_amplitudes.shape != times.shape:
            raise ValueError("origin trace must match the fit times")
        retained = math.sqrt(max(1.0 - 2.0 * beta_hat**2, 1e-300))
        gamma = min(max(float(np.mean(origin_amplitudes)) / retained, 0.0), 1.0)

    return replace(model_init, beta=beta_hat, tau=tau_hat, gamma_mag=gamma)
