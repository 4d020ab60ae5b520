"""Echo-to-envelope preprocessing chain.

``extract_displacement`` converts a complex echo into body displacement via
phase unwrapping, ``bandpass_respiration`` isolates the respiratory component
with a moving-average detrender followed by a Hann smoother, and
``amplitude_envelope`` computes the sliding RMS amplitude that the mixture
model downstream operates on.

All three are pure functions: they never mutate their inputs and preserve the
input's sample rate and start time, so outputs stay alignable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SeriesTooShort, ZeroMagnitudeSample
from .series import ComplexEchoSeries, ScalarSeries

# 79 GHz carrier; lambda = c / f with c ~ 3e8 m/s.
DEFAULT_WAVELENGTH_MM = 3.797

DEFAULT_SAMPLE_RATE = 10.0


@dataclass(frozen=True)
class FilterConfig:
    """Window lengths, in seconds, for the respiration filter and envelope.

    ``h1_length`` is the rectangular (moving-average) detrending window,
    ``h2_length`` the Hann smoothing window, and ``envelope_length`` the RMS
    averaging window.  All kernels are unit-sum and forced to an odd sample
    count so the cascade is zero-phase.
    """

    h1_length: float = 6.0
    h2_length: float = 1.1
    envelope_length: float = 5.0

    def __post_init__(self):
        for name in ("h1_length", "h2_length", "envelope_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _odd_window_samples(length_s: float, sample_rate: float, name: str) -> int:
    """Largest odd sample count whose span does not exceed ``length_s``."""
    n = math.floor(length_s * sample_rate)
    if n < 1:
        raise ValueError(f"{name} window spans no samples at {sample_rate} Hz")
    return n if n % 2 == 1 else n - 1


def _convolve_same(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-length convolution with edge-value padding.

    The kernel must have odd length; the result is the zero-phase filtered
    series on the original sample grid.
    """
    half = (kernel.size - 1) // 2
    padded = np.pad(values, half, mode="edge") if half else values
    return np.convolve(padded, kernel, mode="valid")


def rectangular_kernel(length_s: float, sample_rate: float) -> np.ndarray:
    """Unit-sum moving-average kernel (odd sample count)."""
    n = _odd_window_samples(length_s, sample_rate, "rectangular")
    return np.full(n, 1.0 / n)


def hann_kernel(length_s: float, sample_rate: float) -> np.ndarray:
    """Unit-sum Hann kernel (odd sample count)."""
    n = _odd_window_samples(length_s, sample_rate, "Hann")
    window = np.hanning(n)
    return window / window.sum()


def extract_displacement(echo: ComplexEchoSeries) -> ScalarSeries:
    """Body displacement, in mm, from the echo's unwrapped phase.

    The displacement is ``(wavelength / 4 pi) * unwrap(angle(samples))``; the
    first output value corresponds to the principal phase in (-pi, pi].
    Round trips are exact whenever successive phase steps stay below pi.

    Raises
    ------
    ZeroMagnitudeSample
        If any echo sample has zero magnitude (its phase is undefined).
    """
    magnitude = np.abs(echo.samples)
    zero = np.flatnonzero(magnitude == 0.0)
    if zero.size:
        raise ZeroMagnitudeSample(int(zero[0]))
    phase = np.unwrap(np.angle(echo.samples))
    scale = echo.wavelength / (4.0 * np.pi)
    return ScalarSeries(scale * phase, echo.sample_rate, 0.0, role="displacement")


def bandpass_respiration(dprime: ScalarSeries, cfg: FilterConfig = FilterConfig()) -> ScalarSeries:
    """Respiratory displacement: remove the moving-average trend, then smooth.

    Computes ``(x - x * h1) * h2`` where ``h1`` is a unit-sum rectangular
    kernel and ``h2`` a unit-sum Hann kernel.  Edge-value padding keeps the
    output the same length as the input; samples within the combined kernel
    half-width of either end are edge-affected.

    Raises
    ------
    SeriesTooShort
        If the series is shorter than the ``h1`` window.
    """
    h1 = rectangular_kernel(cfg.h1_length, dprime.sample_rate)
    h2 = hann_kernel(cfg.h2_length, dprime.sample_rate)
    if len(dprime) < h1.size:
        raise SeriesTooShort(
            f"series of {len(dprime)} samples is shorter than the "
            f"{h1.size}-sample detrending window"
        )
    detrended = dprime.values - _convolve_same(dprime.values, h1)
    smoothed = _convolve_same(detrended, h2)
    return dprime.with_values(smoothed, role="respiration")


def amplitude_envelope(d: ScalarSeries, cfg: FilterConfig = FilterConfig()) -> ScalarSeries:
    """Sliding RMS amplitude of the respiratory displacement.

    Each output sample is the root of the mean of ``d**2`` over a centred
    window of ``envelope_length`` seconds.  Near the boundaries the window
    shrinks symmetrically around its centre and the mean is renormalised by
    the actual window size, so the output keeps the input length.  The result
    is non-negative and scales linearly with the input amplitude.

    Raises
    ------
    SeriesTooShort
        If the series is shorter than the envelope window.
    """
    n = _odd_window_samples(cfg.envelope_length, d.sample_rate, "envelope")
    if len(d) < n:
        raise SeriesTooShort(
            f"series of {len(d)} samples is shorter than the {n}-sample envelope window"
        )
    half = (n - 1) // 2
    squared = d.values * d.values
    csum = np.concatenate(([0.0], np.cumsum(squared)))
    idx = np.arange(len(d))
    reach = np.minimum(half, np.minimum(idx, len(d) - 1 - idx))
    window_sum = csum[idx + reach + 1] - csum[idx - reach]
    env = np.sqrt(window_sum / (2 * reach + 1))
    return d.with_values(env, role="envelope")


def envelope_from_echo(echo: ComplexEchoSeries, cfg: FilterConfig = FilterConfig()) -> ScalarSeries:
    """Full chain: displacement extraction, respiration bandpass, RMS envelope."""
    return amplitude_envelope(bandpass_respiration(extract_displacement(echo), cfg), cfg)
