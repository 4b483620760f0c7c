"""
Experiment Configuration
Frozen dataclass tree read from and written to TOML.

One experiment per file. ``from_dict(to_dict(cfg)) == cfg`` holds for every
valid configuration, and unknown keys are rejected.
"""

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import tomli_w

from ..exceptions import ConfigError

G_MODES = ('stabilizing', 'explicit')
K_MODES = ('constant', 'explicit', 'placement', 'lyapunov')
PROTOCOLS = ('benchmark', 'segments')


def _reject_unknown(cls, data: Dict[str, Any], section: str) -> None:
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")


def _floats(values, name: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a list of numbers") from exc


def _drop_none(data: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in data.items() if v is not None}


@dataclass(frozen=True)
class MatrixMarketSource:
    a: str
    b: str
    c: str

    def paths(self) -> Tuple[Path, Path, Path]:
        return Path(self.a), Path(self.b), Path(self.c)


@dataclass(frozen=True)
class SurrogateSource:
    n: int = 348
    stiffness: float = 2.5e8
    damping: float = 8.0e5
    mass: float = 1.0e7


@dataclass(frozen=True)
class SystemSource:
    """Exactly one of the MatrixMarket triple and the surrogate beam."""
    matrix_market: Optional[MatrixMarketSource] = None
    surrogate: Optional[SurrogateSource] = None

    def __post_init__(self):
        if (self.matrix_market is None) == (self.surrogate is None):
            raise ConfigError("[system] needs exactly one of 'matrix_market' and 'surrogate'")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SystemSource":
        _reject_unknown(cls, data, 'system')
        mm = data.get('matrix_market')
        sur = data.get('surrogate')
        try:
            return cls(
                matrix_market=MatrixMarketSource(**mm) if mm is not None else None,
                surrogate=SurrogateSource(**sur) if sur is not None else None,
            )
        except TypeError as exc:
            raise ConfigError(f"[system]: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return _drop_none({
            'matrix_market': dataclasses.asdict(self.matrix_market) if self.matrix_market else None,
            'surrogate': dataclasses.asdict(self.surrogate) if self.surrogate else None,
        })


@dataclass(frozen=True)
class GeneratorSpec:
    dc: bool = True
    frequencies: Tuple[float, ...] = ()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GeneratorSpec":
        _reject_unknown(cls, data, 'generator')
        return cls(dc=bool(data.get('dc', True)), frequencies=_floats(data.get('frequencies', ()), 'frequencies'))

    def to_dict(self) -> Dict[str, Any]:
        return {'dc': self.dc, 'frequencies': list(self.frequencies)}


@dataclass(frozen=True)
class GainGSpec:
    """
    mode 'stabilizing': G from the plant Lyapunov matrix with weight Q
    (identity, or diag(q_diagonal) when given). mode 'explicit': G = values.
    """
    mode: str = 'stabilizing'
    values: Tuple[float, ...] = ()
    q_diagonal: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.mode not in G_MODES:
            raise ConfigError(f"[gain_g] mode must be one of {G_MODES}, got {self.mode!r}")
        if self.mode == 'explicit' and not self.values:
            raise ConfigError("[gain_g] explicit mode needs 'values'")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GainGSpec":
        _reject_unknown(cls, data, 'gain_g')
        return cls(mode=data.get('mode', 'stabilizing'),
                   values=_floats(data.get('values', ()), 'gain_g.values'),
                   q_diagonal=_floats(data.get('q_diagonal', ()), 'gain_g.q_diagonal'))

    def to_dict(self) -> Dict[str, Any]:
        return {'mode': self.mode, 'values': list(self.values), 'q_diagonal': list(self.q_diagonal)}


@dataclass(frozen=True)
class GainKSpec:
    """
    mode 'constant': K = value * [1 ... 1]^T (value 100 by default).
    mode 'explicit': K = values. mode 'placement': poles given as [re, im] pairs.
    mode 'lyapunov': K = value * (Pi^T P Pi)^-1 (C Pi)^T.
    """
    mode: str = 'constant'
    value: float = 100.0
    values: Tuple[float, ...] = ()
    poles: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.mode not in K_MODES:
            raise ConfigError(f"[gain_k] mode must be one of {K_MODES}, got {self.mode!r}")
        if self.mode == 'explicit' and not self.values:
            raise ConfigError("[gain_k] explicit mode needs 'values'")
        if self.mode == 'placement' and not self.poles:
            raise ConfigError("[gain_k] placement mode needs 'poles'")
        if not math.isfinite(self.value):
            raise ConfigError(f"[gain_k] value must be finite, got {self.value}")
        if self.mode == 'lyapunov' and self.value < 0:
            raise ConfigError(f"[gain_k] lyapunov mode needs a non-negative value, got {self.value}")

    def pole_values(self):
        return [complex(re, im) for re, im in self.poles]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GainKSpec":
        _reject_unknown(cls, data, 'gain_k')
        poles = []
        for pole in data.get('poles', ()):
            pair = _floats(pole, 'gain_k.poles')
            if len(pair) != 2:
                raise ConfigError("[gain_k] poles must be [re, im] pairs")
            poles.append(pair)
        return cls(mode=data.get('mode', 'constant'), value=float(data.get('value', 100.0)),
                   values=_floats(data.get('values', ()), 'gain_k.values'), poles=tuple(poles))

    def to_dict(self) -> Dict[str, Any]:
        return {'mode': self.mode, 'value': self.value, 'values': list(self.values),
                'poles': [list(p) for p in self.poles]}


@dataclass(frozen=True)
class ScheduleSpec:
    """
    protocol 'benchmark': the seven-segment protocol scaled by T.
    protocol 'segments': explicit segment tables (see ``InputSchedule.from_dict``).
    """
    protocol: str = 'benchmark'
    T: float = 1000.0
    levels: Tuple[float, float] = (1.0, -1.0)
    sine_amplitude: float = 1.0
    omega1: float = 0.104
    omega2: float = 0.569
    ramp_peak: float = 2.0
    noise_variance: float = 4.0
    noise_period: float = 1.0
    segments: Tuple[Dict[str, Any], ...] = ()

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"[schedule] protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.protocol == 'segments' and not self.segments:
            raise ConfigError("[schedule] segments protocol needs at least one [[schedule.segments]] table")
        if self.T <= 0:
            raise ConfigError(f"[schedule] T must be positive, got {self.T}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScheduleSpec":
        _reject_unknown(cls, data, 'schedule')
        kwargs = dict(data)
        if 'levels' in kwargs:
            kwargs['levels'] = _floats(kwargs['levels'], 'schedule.levels')
        kwargs['segments'] = tuple(dict(s) for s in kwargs.get('segments', ()))
        for key in ('T', 'sine_amplitude', 'omega1', 'omega2', 'ramp_peak', 'noise_variance', 'noise_period'):
            if key in kwargs:
                kwargs[key] = float(kwargs[key])
        return cls(**kwargs)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data['levels'] = list(self.levels)
        data['segments'] = [dict(s) for s in self.segments]
        return data


@dataclass(frozen=True)
class NoiseConfig:
    snr_db: float = 20.0
    sample_period: float = 1.0

    def __post_init__(self):
        if self.sample_period <= 0:
            raise ConfigError("[noise] sample_period must be positive")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ConfigError(f"[noise] snr_db must be a number above -inf dB, got {self.snr_db}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NoiseConfig":
        _reject_unknown(cls, data, 'noise')
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class IntegrationSpec:
    h: float = 0.05
    t_final: Optional[float] = None

    def __post_init__(self):
        if self.h <= 0:
            raise ConfigError(f"[integration] h must be positive, got {self.h}")
        if self.t_final is not None and self.t_final <= 0:
            raise ConfigError(f"[integration] t_final must be positive, got {self.t_final}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IntegrationSpec":
        _reject_unknown(cls, data, 'integration')
        t_final = data.get('t_final')
        return cls(h=float(data.get('h', 0.05)), t_final=None if t_final is None else float(t_final))


@dataclass(frozen=True)
class OutputSpec:
    out_dir: str = 'lodo-out'
    full_state: bool = False
    bound: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OutputSpec":
        _reject_unknown(cls, data, 'output')
        return cls(out_dir=str(data.get('out_dir', 'lodo-out')), full_state=bool(data.get('full_state', False)),
                   bound=bool(data.get('bound', False)))


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: plant, generator, gains, input, noise, integration and outputs."""
    system: SystemSource
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    gain_g: GainGSpec = field(default_factory=GainGSpec)
    gain_k: GainKSpec = field(default_factory=GainKSpec)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    noise: Optional[NoiseConfig] = None
    integration: IntegrationSpec = field(default_factory=IntegrationSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 0
    name: str = 'experiment'

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        _reject_unknown(cls, data, 'top level')
        if 'system' not in data:
            raise ConfigError("missing [system] section")
        try:
            return cls(
                system=SystemSource.from_dict(data['system']),
                generator=GeneratorSpec.from_dict(data.get('generator', {})),
                gain_g=GainGSpec.from_dict(data.get('gain_g', {})),
                gain_k=GainKSpec.from_dict(data.get('gain_k', {})),
                schedule=ScheduleSpec.from_dict(data.get('schedule', {})),
                noise=NoiseConfig.from_dict(data['noise']) if 'noise' in data else None,
                integration=IntegrationSpec.from_dict(data.get('integration', {})),
                output=OutputSpec.from_dict(data.get('output', {})),
                seed=int(data.get('seed', 0)),
                name=str(data.get('name', 'experiment')),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid configuration value: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return _drop_none({
            'name': self.name,
            'seed': self.seed,
            'system': self.system.to_dict(),
            'generator': self.generator.to_dict(),
            'gain_g': self.gain_g.to_dict(),
            'gain_k': self.gain_k.to_dict(),
            'schedule': self.schedule.to_dict(),
            'noise': dataclasses.asdict(self.noise) if self.noise else None,
            'integration': _drop_none(dataclasses.asdict(self.integration)),
            'output': dataclasses.asdict(self.output),
        })

    def with_overrides(self, seed: Optional[int] = None, h: Optional[float] = None,
                       out_dir: Optional[str] = None, full_state: Optional[bool] = None,
                       bound: Optional[bool] = None) -> "ExperimentConfig":
        """Apply command-line overrides; None leaves a value unchanged."""
        config = self
        if seed is not None:
            config = dataclasses.replace(config, seed=int(seed))
        if h is not None:
            config = dataclasses.replace(config, integration=dataclasses.replace(config.integration, h=float(h)))
        output = config.output
        if out_dir is not None:
            output = dataclasses.replace(output, out_dir=str(out_dir))
        if full_state is not None:
            output = dataclasses.replace(output, full_state=bool(full_state))
        if bound is not None:
            output = dataclasses.replace(output, bound=bool(bound))
        return dataclasses.replace(config, output=output)

    def check_files(self) -> None:
        """Raise ConfigError when a referenced input file is missing."""
        if self.system.matrix_market is None:
            return
        missing = [str(p) for p in self.system.matrix_market.paths() if not p.is_file()]
        if missing:
            raise ConfigError(f"missing MatrixMarket file(s): {', '.join(missing)}")


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def dumps_config(config: ExperimentConfig) -> str:
    return tomli_w.dumps(config.to_dict())


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read an experiment file.

    Relative MatrixMarket paths are resolved against the file's directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = parse_config(text)
    mm = config.system.matrix_market
    if mm is not None:
        base = path.parent
        resolved = MatrixMarketSource(*(str(p if p.is_absolute() else base / p) for p in mm.paths()))
        config = dataclasses.replace(config, system=SystemSource(matrix_market=resolved))
    return config


def dump_config(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, 'wb') as fh:
        tomli_w.dump(config.to_dict(), fh)
    return path
