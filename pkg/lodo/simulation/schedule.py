"""
Input Schedules
Piecewise input signals u(t) built from constant, sinusoidal, ramp and
zero-order-hold noise segments.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ConfigError
from .noise import zoh_noise

WINDOW_TOL = 1e-9

# Default experiment protocol
OMEGA1 = 0.104
OMEGA2 = 0.569
NOISE_VARIANCE = 4.0
NOISE_PERIOD = 1.0


@dataclass(frozen=True)
class Constant:
    level: float
    kind: str = field(default='constant', init=False)

    def __call__(self, t: np.ndarray, t_start: float, t_end: float) -> np.ndarray:
        return np.full(np.shape(t), float(self.level))

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'level': self.level}


@dataclass(frozen=True)
class Sine:
    """amplitude * sin(frequency * t + phase), with t the absolute time."""
    amplitude: float
    frequency: float
    phase: float = 0.0
    kind: str = field(default='sine', init=False)

    def __call__(self, t: np.ndarray, t_start: float, t_end: float) -> np.ndarray:
        return self.amplitude * np.sin(self.frequency * np.asarray(t, dtype=float) + self.phase)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'amplitude': self.amplitude, 'frequency': self.frequency, 'phase': self.phase}


@dataclass(frozen=True)
class Multisine:
    """``offset`` plus the sum of the sine components."""
    components: Tuple[Sine, ...]
    offset: float = 0.0
    kind: str = field(default='multisine', init=False)

    def __call__(self, t: np.ndarray, t_start: float, t_end: float) -> np.ndarray:
        total = np.full(np.shape(t), float(self.offset))
        for sine in self.components:
            total = total + sine(t, t_start, t_end)
        return total

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'offset': self.offset, 'components': [c.to_dict() for c in self.components]}


@dataclass(frozen=True)
class Ramp:
    """Linear interpolation from ``start`` at t_start to ``end`` at t_end."""
    start: float
    end: float
    kind: str = field(default='ramp', init=False)

    def __call__(self, t: np.ndarray, t_start: float, t_end: float) -> np.ndarray:
        fraction = (np.asarray(t, dtype=float) - t_start) / (t_end - t_start)
        return self.start + (self.end - self.start) * fraction

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'start': self.start, 'end': self.end}


@dataclass(frozen=True)
class ZohNoise:
    """
    Zero-mean Gaussian samples drawn every ``sample_period`` seconds and held.

    Samples come from PCG64 seeded with ``seed``; sample k covers
    [t_start + k*period, t_start + (k+1)*period).
    """
    variance: float
    sample_period: float
    seed: int = 0
    kind: str = field(default='zoh_noise', init=False)

    def __post_init__(self):
        if self.sample_period <= 0:
            raise ConfigError(f"zoh_noise sample_period must be positive, got {self.sample_period}")
        if self.variance < 0:
            raise ConfigError(f"zoh_noise variance must be non-negative, got {self.variance}")

    def __call__(self, t: np.ndarray, t_start: float, t_end: float) -> np.ndarray:
        return zoh_noise(self.variance, self.sample_period, self.seed, t, t0=t_start)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'variance': self.variance, 'sample_period': self.sample_period, 'seed': self.seed}


Signal = Union[Constant, Sine, Multisine, Ramp, ZohNoise]


def signal_from_dict(data: Dict[str, Any]) -> Signal:
    """Inverse of ``to_dict`` on the signal classes."""
    data = dict(data)
    kind = data.pop('kind', None)
    try:
        if kind == 'constant':
            return Constant(float(data['level']))
        if kind == 'sine':
            return Sine(float(data['amplitude']), float(data['frequency']), float(data.get('phase', 0.0)))
        if kind == 'multisine':
            return Multisine(tuple(signal_from_dict({**c, 'kind': 'sine'}) for c in data['components']),
                             float(data.get('offset', 0.0)))
        if kind == 'ramp':
            return Ramp(float(data['start']), float(data['end']))
        if kind == 'zoh_noise':
            return ZohNoise(float(data['variance']), float(data['sample_period']), int(data.get('seed', 0)))
    except KeyError as exc:
        raise ConfigError(f"segment of kind {kind!r} is missing {exc}") from exc
    raise ConfigError(f"unknown segment kind {kind!r}")


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    signal: Signal

    @property
    def kind(self) -> str:
        return self.signal.kind

    def to_dict(self) -> Dict[str, Any]:
        return {'t_start': self.t_start, 't_end': self.t_end, **self.signal.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Segment":
        data = dict(data)
        try:
            t_start, t_end = float(data.pop('t_start')), float(data.pop('t_end'))
        except KeyError as exc:
            raise ConfigError(f"segment is missing {exc}") from exc
        return cls(t_start, t_end, signal_from_dict(data))


@dataclass(frozen=True)
class InputSchedule:
    """
    Ordered, contiguous segments covering [0, t_final].

    Windows are half-open [t_start, t_end) except the last, which is closed.
    Times past t_final keep the last segment's law.
    """
    segments: Tuple[Segment, ...]

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ConfigError("schedule needs at least one segment")
        if abs(segments[0].t_start) > WINDOW_TOL:
            raise ConfigError(f"schedule must start at t=0, starts at {segments[0].t_start}")
        for seg in segments:
            if seg.t_end <= seg.t_start:
                raise ConfigError(f"empty segment window [{seg.t_start}, {seg.t_end})")
        for prev, nxt in zip(segments, segments[1:]):
            if abs(nxt.t_start - prev.t_end) > WINDOW_TOL * max(1.0, prev.t_end):
                raise ConfigError(f"segments not contiguous at t={prev.t_end} / t={nxt.t_start}")
        object.__setattr__(self, 'segments', segments)

    @property
    def t_final(self) -> float:
        return self.segments[-1].t_end

    @property
    def boundaries(self) -> np.ndarray:
        return np.array([s.t_start for s in self.segments] + [self.t_final])

    def segment_index(self, times) -> np.ndarray:
        starts = np.array([s.t_start for s in self.segments])
        idx = np.searchsorted(starts, np.asarray(times, dtype=float), side='right') - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def evaluate(self, times) -> np.ndarray:
        """u at each time (vectorized)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if np.any(times < -WINDOW_TOL):
            raise ValueError("input schedule is defined for t >= 0 only")
        out = np.empty_like(times)
        idx = self.segment_index(times)
        for k, seg in enumerate(self.segments):
            mask = idx == k
            if np.any(mask):
                out[mask] = seg.signal(times[mask], seg.t_start, seg.t_end)
        return out

    def __call__(self, t: float) -> float:
        return float(self.evaluate(t)[0])

    def to_dict(self) -> Dict[str, Any]:
        return {'segments': [s.to_dict() for s in self.segments]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InputSchedule":
        return cls(tuple(Segment.from_dict(s) for s in data.get('segments', [])))


def constant_schedule(level: float, t_final: float) -> InputSchedule:
    return InputSchedule((Segment(0.0, t_final, Constant(level)),))


def sine_schedule(t_final: float, frequency: float, amplitude: float = 1.0, offset: float = 0.0) -> InputSchedule:
    """offset + amplitude * sin(frequency t) over [0, t_final]."""
    signal = Multisine((Sine(amplitude, frequency),), offset)
    return InputSchedule((Segment(0.0, t_final, signal),))


def benchmark_schedule(T: float = 1000.0, levels: Sequence[float] = (1.0, -1.0), sine_amplitude: float = 1.0,
                       omega1: float = OMEGA1, omega2: float = OMEGA2, ramp_peak: float = 2.0,
                       noise_variance: float = NOISE_VARIANCE, noise_period: float = NOISE_PERIOD,
                       seed: int = 0) -> InputSchedule:
    """
    Seven-segment benchmark protocol over [0, 7T].

    Two constants, a sine at omega1, a two-tone sine, an up-ramp, a down-ramp
    and zero-order-hold Gaussian noise. Amplitudes are configurable defaults.
    """
    if T <= 0:
        raise ConfigError(f"segment length T must be positive, got {T}")
    if len(levels) != 2:
        raise ConfigError("levels must hold the two constant input values")
    s1 = Sine(sine_amplitude, omega1)
    s2 = Sine(sine_amplitude, omega2)
    signals = [
        Constant(levels[0]),
        Constant(levels[1]),
        s1,
        Multisine((s1, s2)),
        Ramp(0.0, ramp_peak),
        Ramp(ramp_peak, 0.0),
        ZohNoise(noise_variance, noise_period, seed),
    ]
    return InputSchedule(tuple(Segment(k * T, (k + 1) * T, sig) for k, sig in enumerate(signals)))
