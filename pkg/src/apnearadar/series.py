"""Uniformly sampled time-series containers.

Both container types are immutable: the sample arrays are copied on
construction and marked read-only, so instances can be shared freely
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class ScalarSeries:
    """Real-valued series sampled at a fixed rate.

    ``values`` carry millimetres for displacement and envelope tracks, and
    dimensionless numbers in [0, 1] for label tracks.  ``role`` is a free-form
    tag ("displacement", "envelope", ...) used for plot legends and reports;
    it does not participate in equality.
    """

    values: np.ndarray
    sample_rate: float
    start_time: float = 0.0
    role: str = field(default="", compare=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        if not np.isfinite(self.start_time):
            raise ValueError("start_time must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.start_time == other.start_time
            and np.array_equal(self.values, other.values)
        )

    @property
    def duration(self) -> float:
        """Record length in seconds (n / sample_rate)."""
        return len(self) / self.sample_rate

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self)) / self.sample_rate

    def segment(self, start_index: int, stop_index: int, role: str | None = None) -> "ScalarSeries":
        """Sub-series covering ``[start_index, stop_index)`` of this one."""
        if not 0 <= start_index <= stop_index <= len(self):
            raise IndexError(f"segment [{start_index}, {stop_index}) out of range")
        return ScalarSeries(
            self.values[start_index:stop_index],
            self.sample_rate,
            self.start_time + start_index / self.sample_rate,
            role if role is not None else self.role,
        )

    def with_values(self, values: np.ndarray, role: str | None = None) -> "ScalarSeries":
        """New series on the same time base with different values."""
        return ScalarSeries(
            values,
            self.sample_rate,
            self.start_time,
            role if role is not None else self.role,
        )

    def alignable_with(self, other: "ScalarSeries") -> bool:
        """True when both series share a rate and their start times differ by
        an integer number of samples."""
        if self.sample_rate != other.sample_rate:
            return False
        offset = (other.start_time - self.start_time) * self.sample_rate
        return abs(offset - round(offset)) <= 1e-9


@dataclass(frozen=True, eq=False)
class ComplexEchoSeries:
    """Complex radar echo sampled at a fixed rate.

    ``wavelength`` is the carrier wavelength in millimetres; it sets the
    phase-to-displacement scale.
    """

    samples: np.ndarray
    sample_rate: float
    wavelength: float

    def __post_init__(self):
        arr = np.array(self.samples, dtype=complex, copy=True)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if arr.size == 0:
            raise ValueError("samples must be non-empty")
        if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
            raise ValueError("samples must be finite")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexEchoSeries):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.wavelength == other.wavelength
            and np.array_equal(self.samples, other.samples)
        )
