"""
Experiment Runner
Builds the plant, reduced model and observer from a configuration, simulates
the input schedule and writes the trace, bound and report artifacts.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..analysis.bounds import bound_for_trace, check_bound
from ..core.linalg import eigenvalues
from ..exceptions import (
    CertificationError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    GeneratorError,
    LodoError,
    MatrixMarketError,
    NotHurwitzError,
    NumericalError,
    PlacementError,
    SpectralCollisionError,
)
from ..observer.design import build_observer, constant_gain, design_K_lyapunov, design_K_pole_placement
from ..observer.error_system import assemble_error_system
from ..reduction.moments import build_rom, design_G_stabilizing, frequency_response, verify_moment_matching
from ..simulation.beam import surrogate_beam
from ..simulation.integrator import integrate, segment_summary, write_bound_csv, write_trace_csv
from ..simulation.noise import NoiseSpec
from ..simulation.schedule import InputSchedule, benchmark_schedule
from ..systems.generators import build_generator
from ..systems.models import SignalGenerator, StateSpaceSystem, ValidationReport, to_builtin
from ..systems.validation import validate_sa1, validate_sa2
from .config import ExperimentConfig, load_config
from .matrix_market import load_matrix_market

logger = logging.getLogger(__name__)

SNR_TOLERANCE_DB = 0.5
LYAPUNOV_RTOL = 1e-8
BODE_OMEGAS = np.logspace(-3, 2, 400)
# errors a run reports through its exit code instead of propagating
RUN_ERRORS = (LodoError, np.linalg.LinAlgError)


class ExitCode(IntEnum):
    OK = 0
    CONFIG = 2
    ASSUMPTION = 3
    CERTIFICATION = 4
    NUMERICAL = 5
    CHECK_FAILED = 6


def exit_code_for(exc: BaseException) -> ExitCode:
    """Map a toolkit error to its documented exit code."""
    if isinstance(exc, (ConfigError, MatrixMarketError, DimensionError, GeneratorError)):
        return ExitCode.CONFIG
    if isinstance(exc, (SpectralCollisionError, NotHurwitzError)):
        return ExitCode.ASSUMPTION
    if isinstance(exc, (CertificationError, PlacementError)):
        return ExitCode.CERTIFICATION
    if isinstance(exc, (NumericalError, ConvergenceError, np.linalg.LinAlgError)):
        return ExitCode.NUMERICAL
    return ExitCode.NUMERICAL


@dataclass
class RunResult:
    """Outcome of one experiment: exit code, report document and written files."""
    exit_code: ExitCode
    report: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, str] = field(default_factory=dict)
    message: str = ''

    @property
    def ok(self) -> bool:
        return self.exit_code == ExitCode.OK


def build_system(config: ExperimentConfig) -> StateSpaceSystem:
    source = config.system
    if source.surrogate is not None:
        s = source.surrogate
        return surrogate_beam(s.n, s.stiffness, s.damping, s.mass, verify=False)
    config.check_files()
    a, b, c = source.matrix_market.paths()
    return StateSpaceSystem(load_matrix_market(a), load_matrix_market(b), load_matrix_market(c))


def build_signal_generator(config: ExperimentConfig) -> SignalGenerator:
    return build_generator(config.generator.dc, config.generator.frequencies)


def build_schedule(config: ExperimentConfig) -> InputSchedule:
    spec = config.schedule
    if spec.protocol == 'segments':
        return InputSchedule.from_dict({'segments': list(spec.segments)})
    return benchmark_schedule(
        T=spec.T, levels=spec.levels, sine_amplitude=spec.sine_amplitude, omega1=spec.omega1,
        omega2=spec.omega2, ramp_peak=spec.ramp_peak, noise_variance=spec.noise_variance,
        noise_period=spec.noise_period, seed=config.seed,
    )


def _q_matrix(q_diagonal, n: int) -> Optional[np.ndarray]:
    if not q_diagonal:
        return None
    if len(q_diagonal) != n:
        raise ConfigError(f"[gain_g] q_diagonal needs {n} entries, got {len(q_diagonal)}")
    return np.diag(q_diagonal)


def design_reduced_model(config: ExperimentConfig, system: StateSpaceSystem, generator: SignalGenerator):
    """Reduced model with G per the configured mode."""
    nu = generator.nu
    g_spec = config.gain_g
    if g_spec.mode == 'stabilizing':
        G = design_G_stabilizing(system, generator, _q_matrix(g_spec.q_diagonal, system.n))
    else:
        if len(g_spec.values) != nu:
            raise ConfigError(f"[gain_g] needs {nu} values, got {len(g_spec.values)}")
        G = np.array(g_spec.values).reshape(nu, 1)
    return build_rom(system, generator, G)


def design_observer_gain(config: ExperimentConfig, system: StateSpaceSystem, rom) -> np.ndarray:
    """Observer gain K per the configured mode."""
    nu = rom.nu
    k_spec = config.gain_k
    if k_spec.mode == 'constant':
        return constant_gain(nu, k_spec.value)
    if k_spec.mode == 'explicit':
        if len(k_spec.values) != nu:
            raise ConfigError(f"[gain_k] needs {nu} values, got {len(k_spec.values)}")
        return np.array(k_spec.values).reshape(nu, 1)
    if k_spec.mode == 'placement':
        return design_K_pole_placement(rom.generator, rom.G, rom.H, k_spec.pole_values())
    Q = _q_matrix(config.gain_g.q_diagonal, system.n)
    return design_K_lyapunov(rom, system, kappa=k_spec.value, Q=Q)


def _validation_block(sa1: ValidationReport, sa2: ValidationReport) -> Dict[str, Any]:
    return {'sa1': sa1.to_dict(), 'sa2': sa2.to_dict()}


def _write_report(out_dir: Path, report: Dict[str, Any], artifacts: Dict[str, str]) -> None:
    json_path = out_dir / 'report.json'
    text_path = out_dir / 'report.txt'
    artifacts['report_json'] = str(json_path)
    artifacts['report_txt'] = str(text_path)
    report['artifacts'] = dict(artifacts)
    json_path.write_text(json.dumps(to_builtin(report), indent=2, allow_nan=True) + '\n', encoding='utf-8')
    text_path.write_text(format_report(report), encoding='utf-8')


def format_report(report: Dict[str, Any]) -> str:
    """Human-readable rendition of a report document."""
    lines = [f"Experiment: {report.get('config', {}).get('name', '?')}",
             f"Exit code:  {report.get('exit_code')} {report.get('status', '')}", ""]
    for key in ('sa1', 'sa2'):
        block = report.get('validation', {}).get(key)
        if block:
            state = 'PASS' if block['is_valid'] else 'FAIL'
            lines.append(f"[{state}] {block['name']}")
            lines += [f"    error: {e}" for e in block['errors']]
            lines += [f"    warning: {w}" for w in block['warnings']]
    if 'iss' in report:
        iss = report['iss']
        lines += ["", "ISS constants:",
                  f"    c1 = {iss['c1']:.6g}", f"    c2 = {iss['c2']:.6g}", f"    c3 = {iss['c3']:.6g}"]
    if 'xi_spectrum' in report:
        sp = report['xi_spectrum']
        lines.append(f"Error-system spectrum: abscissa {sp['abscissa']:.6g}, "
                     f"min real {sp['min_real']:.6g}, max |lambda| {sp['max_abs']:.6g}")
    if report.get('segments'):
        lines += ["", f"{'Segment':<12} {'t_start':>10} {'t_end':>10} {'max J (%)':>14}", "-" * 50]
        for seg in report['segments']:
            max_J = 'n/a' if seg['max_J'] is None else f"{seg['max_J']:.6g}"
            lines.append(f"{seg['kind']:<12} {seg['t_start']:>10g} {seg['t_end']:>10g} {max_J:>14}")
    if report.get('snr_db') is not None:
        lines.append(f"\nRealized SNR: {report['snr_db']:.4f} dB")
    if report.get('checks'):
        lines += ["", "Checks:"]
        for name, check in report['checks'].items():
            lines.append(f"    {name}: {check['status']}")
    if report.get('message'):
        lines += ["", report['message']]
    return "\n".join(lines) + "\n"


def _check(passed: Optional[bool], **details) -> Dict[str, Any]:
    status = 'skipped' if passed is None else ('pass' if passed else 'fail')
    return {'status': status, **details}


def run_experiment(config: ExperimentConfig) -> RunResult:
    """
    Run one experiment end to end.

    Writes ``trace.csv``, ``bound.csv`` (when enabled), ``report.json`` and
    ``report.txt`` under the configured output directory. Failures after the
    output directory exists still produce a report.

    Returns:
        RunResult whose exit code follows ``ExitCode``
    """
    out_dir = Path(config.output.out_dir)
    report: Dict[str, Any] = {'config': config.to_dict()}
    artifacts: Dict[str, str] = {}

    def finish(code: ExitCode, message: str = '') -> RunResult:
        report['exit_code'] = int(code)
        report['status'] = code.name
        if message:
            report['message'] = message
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            _write_report(out_dir, report, artifacts)
        except OSError as exc:
            logger.error("cannot write report to %s: %s", out_dir, exc)
        if code != ExitCode.OK:
            logger.error("%s: %s", code.name, message)
        return RunResult(code, report, dict(artifacts), message)

    try:
        system = build_system(config)
        generator = build_signal_generator(config)
        logger.info("plant n=%d, generator nu=%d", system.n, generator.nu)
        sa1 = validate_sa1(system)
        sa2 = validate_sa2(system, generator)
        report['validation'] = _validation_block(sa1, sa2)
        if not (sa1.is_valid and sa2.is_valid):
            return finish(ExitCode.ASSUMPTION, "; ".join(sa1.errors + sa2.errors))

        rom = design_reduced_model(config, system, generator)
        K = design_observer_gain(config, system, rom)
        report['moment'] = rom.H
        report['G'] = rom.G
        report['K'] = K
        observer = build_observer(rom, K)
        err = assemble_error_system(system, generator, rom, K)
        lams = eigenvalues(err.Xi)
        report['xi_spectrum'] = {
            'abscissa': float(lams.real.max()),
            'min_real': float(lams.real.min()),
            'max_abs': float(np.abs(lams).max()),
        }
        report['iss'] = err.constants()

        schedule = build_schedule(config)
        noise = None
        if config.noise is not None:
            noise = NoiseSpec(config.noise.snr_db, config.noise.sample_period, config.seed)
        trace = integrate(system, observer, schedule, noise, h=config.integration.h,
                          t_final=config.integration.t_final,
                          keep_states=True if config.output.full_state else None)
        report['segments'] = segment_summary(trace, schedule)
        report['snr_db'] = trace.snr_db

        out_dir.mkdir(parents=True, exist_ok=True)
        artifacts['trace_csv'] = str(write_trace_csv(trace, out_dir / 'trace.csv', config.output.full_state))

        checks: Dict[str, Any] = {}
        rom_report = rom.verify(system)
        checks['rom_invariants'] = _check(rom_report.is_valid, errors=rom_report.errors)
        mm_report = verify_moment_matching(system, rom)
        checks['moment_matching'] = _check(mm_report.is_valid, errors=mm_report.errors)
        residual = err.lyapunov_residual()
        checks['lyapunov_residual'] = _check(
            residual <= LYAPUNOV_RTOL * (1.0 + np.linalg.norm(err.P) * np.linalg.norm(err.Xi)),
            residual=residual,
        )
        if noise is not None:
            checks['snr'] = _check(abs(trace.snr_db - noise.snr_db) <= SNR_TOLERANCE_DB,
                                   target=noise.snr_db, realized=trace.snr_db)
        if config.output.bound:
            fit, bound = bound_for_trace(err, observer, trace)
            artifacts['bound_csv'] = str(write_bound_csv(trace.times, bound.values, trace.error_norm,
                                                         out_dir / 'bound.csv'))
            report['omega0'] = {'omega0': fit.omega0, 'tau': fit.tau, 'method': fit.method, 'note': fit.note}
            if noise is None:
                bound_report = check_bound(trace, bound)
                checks['bound'] = _check(bound_report.is_valid, **bound_report.details)
            else:
                checks['bound'] = _check(None, reason="measurement noise is not covered by the bound")
        report['checks'] = checks

        failed = [name for name, check in checks.items() if check['status'] == 'fail']
        if failed:
            return finish(ExitCode.CHECK_FAILED, f"post-condition check(s) failed: {', '.join(failed)}")
        logger.info("experiment %s finished, artifacts in %s", config.name, out_dir)
        return finish(ExitCode.OK)
    except RUN_ERRORS as exc:
        return finish(exit_code_for(exc), str(exc))


def run_config_file(path: Union[str, Path], **overrides) -> RunResult:
    """Load a configuration file, apply overrides and run it."""
    try:
        config = load_config(path).with_overrides(**overrides)
    except LodoError as exc:
        logger.error("%s: %s", path, exc)
        return RunResult(exit_code_for(exc), message=str(exc))
    return run_experiment(config)


def validate_only(config: ExperimentConfig) -> RunResult:
    """SA1 and SA2 reports without designing or simulating anything."""
    try:
        system = build_system(config)
        generator = build_signal_generator(config)
    except LodoError as exc:
        return RunResult(exit_code_for(exc), message=str(exc))
    sa1 = validate_sa1(system)
    sa2 = validate_sa2(system, generator)
    code = ExitCode.OK if sa1.is_valid and sa2.is_valid else ExitCode.ASSUMPTION
    message = "\n".join([sa1.summary(), sa2.summary()])
    return RunResult(code, {'validation': _validation_block(sa1, sa2)}, message=message)


def reduce_only(config: ExperimentConfig) -> RunResult:
    """
    Build the reduced model only.

    Writes ``rom.json`` (moment, G, sigma(F), invariant checks) and
    ``bode.csv`` with columns ``omega,mag_full,mag_rom``.
    """
    out_dir = Path(config.output.out_dir)
    try:
        system = build_system(config)
        generator = build_signal_generator(config)
        sa1 = validate_sa1(system)
        sa2 = validate_sa2(system, generator)
        if not (sa1.is_valid and sa2.is_valid):
            return RunResult(ExitCode.ASSUMPTION, {'validation': _validation_block(sa1, sa2)},
                             message="; ".join(sa1.errors + sa2.errors))
        rom = design_reduced_model(config, system, generator)
    except RUN_ERRORS as exc:
        return RunResult(exit_code_for(exc), message=str(exc))

    out_dir.mkdir(parents=True, exist_ok=True)
    points = generator.spectrum().imag
    omegas = np.union1d(BODE_OMEGAS, points[points > 0])
    full = np.abs(frequency_response(system, omegas))
    reduced = np.abs(frequency_response(rom, omegas))
    bode_path = out_dir / 'bode.csv'
    np.savetxt(bode_path, np.column_stack([omegas, full, reduced]), delimiter=',',
               header='omega,mag_full,mag_rom', comments='', fmt='%.17g', newline='\n')
    mm_report = verify_moment_matching(system, rom)
    document = {
        'validation': _validation_block(sa1, sa2),
        'moment': rom.H,
        'G': rom.G,
        'F_spectrum': eigenvalues(rom.F),
        'rom_invariants': rom.verify(system).to_dict(),
        'moment_matching': mm_report.to_dict(),
    }
    rom_path = out_dir / 'rom.json'
    rom_path.write_text(json.dumps(to_builtin(document), indent=2) + '\n', encoding='utf-8')
    code = ExitCode.OK if mm_report.is_valid else ExitCode.CHECK_FAILED
    return RunResult(code, document, {'bode_csv': str(bode_path), 'rom_json': str(rom_path)})


def _sweep_one(path: Path, out_root: Optional[Path]) -> int:
    try:
        config = load_config(path)
    except LodoError as exc:
        logger.error("%s: %s", path, exc)
        return int(exit_code_for(exc))
    root = Path(config.output.out_dir) if out_root is None else out_root
    config = config.with_overrides(out_dir=str(root / path.stem))
    return int(run_experiment(config).exit_code)


def sweep(directory: Union[str, Path], workers: Optional[int] = None,
          out_root: Optional[Union[str, Path]] = None) -> Dict[str, int]:
    """
    Run every ``*.toml`` experiment in a directory on a thread pool.

    Each experiment writes under ``<out_dir>/<config stem>`` so runs never
    share files.

    Returns:
        Mapping from config file name to exit code
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigError(f"sweep directory {directory} does not exist")
    paths: List[Path] = sorted(directory.glob('*.toml'))
    if not paths:
        raise ConfigError(f"no *.toml experiments in {directory}")
    root = Path(out_root) if out_root is not None else None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(lambda p: _sweep_one(p, root), paths))
    summary = {p.name: code for p, code in zip(paths, codes)}
    logger.info("sweep of %d experiments: %d succeeded", len(paths), sum(c == 0 for c in codes))
    return summary
