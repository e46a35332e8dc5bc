"""
Command-line front end.

Four commands share one set of flags:

    analytic   closed-form rates for one configuration
    sweep      rates over all Evan bases, written as CSV, plus the signature fit
    simulate   one seeded Monte Carlo session
    signature  score a session against the eavesdropping line

Angles are degrees at this boundary and radians everywhere inside. Reports go
to stdout, logs to stderr.
"""
import functools
import math
import sys
from pathlib import Path
from typing import Callable, List, Literal, Optional, Tuple

import click
import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from config.settings import settings
from src.analysis.signature import calibrate_threshold, classify, signature_deviation
from src.analysis.sweep import fit_signature, read_sweep, sweep_table, write_sweep
from src.protocol.session import (
    MAX_SEED,
    EveStrategy,
    Estimate,
    NoiseSpec,
    ProtocolKind,
    ProtocolSpec,
    run_session,
)
from src.protocol.trace import write_trace
from src.protocol.transcript import build_transcript, check_transcript
from src.rates.kmb09 import kmb09_eta_evan, kmb09_iter, kmb09_qber
from src.rates.variant import variant_iter, variant_qb, variant_qber
from src.utils.exceptions import (
    ConfigurationError,
    ContractViolationError,
    DegenerateFitError,
    InvalidAngleError,
    NoDataError,
    SweepFileError,
    UndefinedRateError,
)
from src.utils.logger import logger

EXIT_UNDEFINED = 3
EXIT_SWEEP_FILE = 4
EXIT_IO = 5

NOT_AVAILABLE = "n/a"


def _degrees():
    return Field(default=None, ge=0.0, lt=360.0)


class RunConfig(BaseModel):
    """Validated flags of one CLI invocation."""
    command: Literal["analytic", "sweep", "simulate", "signature"]
    protocol: Literal["kmb09", "variant"] = "kmb09"
    theta1: float = Field(ge=0.0, lt=360.0)
    theta2: Optional[float] = _degrees()
    phi2: Optional[float] = _degrees()
    theta3: Optional[float] = _degrees()
    phi3: Optional[float] = _degrees()
    photons: int = Field(default_factory=lambda: settings.default_photons, ge=1)
    noise: float = Field(default=0.0, ge=0.0, le=1.0)
    eve: bool = False
    seed: Optional[int] = Field(default=None, ge=0, lt=MAX_SEED)
    test_fraction: float = Field(default_factory=lambda: settings.default_test_fraction,
                                 gt=0.0, le=1.0)
    grid: int = Field(default_factory=lambda: settings.default_grid, ge=2)
    out_path: Optional[str] = None
    trace: bool = False
    workers: int = Field(default_factory=lambda: settings.max_workers, ge=1)
    threshold: Optional[float] = Field(default=None, gt=0.0)
    sweep_file: Optional[str] = None
    calibrate: bool = False

    @model_validator(mode="after")
    def _check_angles(self) -> "RunConfig":
        if self.protocol == "variant" and (self.theta2 is None or self.phi2 is None):
            raise ValueError("the variant protocol needs --theta2 and --phi2")
        if (self.theta3 is None) != (self.phi3 is None):
            raise ValueError("--theta3 and --phi3 must be given together")
        if (self.eve or self.calibrate) and self.theta3 is None:
            raise ValueError("--eve and --calibrate need --theta3 and --phi3")
        return self

    @property
    def has_evan_basis(self) -> bool:
        return self.theta3 is not None

    def protocol_spec(self) -> ProtocolSpec:
        return ProtocolSpec(
            kind=ProtocolKind(self.protocol),
            theta1=math.radians(self.theta1),
            theta2=None if self.theta2 is None else math.radians(self.theta2),
            phi2=None if self.phi2 is None else math.radians(self.phi2),
        )

    def eve_strategy(self, present: Optional[bool] = None) -> EveStrategy:
        present = self.eve if present is None else present
        if not present:
            return EveStrategy()
        return EveStrategy(True, math.radians(self.theta3), math.radians(self.phi3))


def fmt_rate(value: float) -> str:
    """Nine significant digits, trailing zeros kept."""
    return f"{value:#.9g}"


def fmt_angle(degrees: float) -> str:
    return f"{degrees:.9g}"


def fmt_estimate(estimate: Estimate) -> str:
    if estimate.no_data:
        return f"{NOT_AVAILABLE} (no data)"
    return f"{fmt_rate(estimate.value)} se {fmt_rate(estimate.std_error)} n {estimate.samples}"


def emit(lines: List[Tuple[str, object]]) -> None:
    for label, value in lines:
        click.echo(f"{label} {value}")


def _config_lines(config: RunConfig) -> List[Tuple[str, object]]:
    lines: List[Tuple[str, object]] = [
        ("protocol", config.protocol),
        ("theta1_deg", fmt_angle(config.theta1)),
    ]
    if config.protocol == "variant":
        lines += [("theta2_deg", fmt_angle(config.theta2)), ("phi2_deg", fmt_angle(config.phi2))]
    if config.has_evan_basis:
        lines += [("theta3_deg", fmt_angle(config.theta3)), ("phi3_deg", fmt_angle(config.phi3))]
    return lines


def build_config(command: str, **flags) -> RunConfig:
    """Validate the raw click flags, turning failures into usage errors."""
    try:
        return RunConfig(command=command, **flags)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'flags'}: {err['msg']}"
            for err in e.errors()
        )
        raise click.UsageError(problems) from e


def handle_errors(func: Callable) -> Callable:
    """Map toolkit exceptions onto exit statuses."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigurationError, ContractViolationError, InvalidAngleError) as e:
            raise click.UsageError(str(e)) from e
        except (UndefinedRateError, DegenerateFitError, NoDataError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_UNDEFINED)
        except SweepFileError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_SWEEP_FILE)
        except OSError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_IO)
    return wrapper


def angle_options(func: Callable) -> Callable:
    options = [
        click.option("--protocol", type=click.Choice(["kmb09", "variant"]), default="kmb09",
                     show_default=True, help="Protocol to analyse."),
        click.option("--theta1", type=float, required=True, help="Angle of Alice's f basis (degrees)."),
        click.option("--theta2", type=float, default=None, help="Polar angle of the h basis (variant)."),
        click.option("--phi2", type=float, default=None, help="Azimuth of the h basis (variant)."),
        click.option("--theta3", type=float, default=None, help="Polar angle of Evan's basis."),
        click.option("--phi3", type=float, default=None, help="Azimuth of Evan's basis."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def session_options(func: Callable) -> Callable:
    options = [
        click.option("--photons", type=int, default=None, help="Photons sent by Alice."),
        click.option("--eve", is_flag=True, help="Evan intercepts every photon in (theta3, phi3)."),
        click.option("--noise", type=float, default=0.0, show_default=True,
                     help="Probability that Bob's outcome is replaced by a uniform index."),
        click.option("--seed", type=int, default=None, help="Session seed; drawn and echoed if omitted."),
        click.option("--test-fraction", type=float, default=None,
                     help="Probability that a photon joins the test sample."),
        click.option("--workers", type=int, default=None, help="Worker threads."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _drop_unset(flags: dict) -> dict:
    return {key: value for key, value in flags.items() if value is not None}


def auto_seed() -> int:
    return int(np.random.SeedSequence().entropy % 2 ** 32)


@click.group()
@click.version_option(version=settings.app_version, prog_name=settings.app_name)
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose: bool) -> None:
    """Error rates, eavesdropping sweeps and Monte Carlo sessions for KMB09."""
    if verbose:
        logger.set_level("DEBUG")


@cli.command()
@angle_options
@handle_errors
def analytic(**flags) -> None:
    """Print ITER, QBER and efficiencies for one configuration."""
    config = build_config("analytic", **_drop_unset(flags))
    spec = config.protocol_spec()
    lines = _config_lines(config)

    if not config.has_evan_basis:
        lines += [("iter", NOT_AVAILABLE), ("qber", NOT_AVAILABLE)]
        if spec.kind == ProtocolKind.VARIANT:
            lines.append(("qb", NOT_AVAILABLE))
        lines += [("eta", fmt_rate(spec.eta())), ("eta_evan", NOT_AVAILABLE)]
        emit(lines)
        return

    params = spec.with_eve(math.radians(config.theta3), math.radians(config.phi3))
    if spec.kind == ProtocolKind.KMB09:
        lines += [
            ("iter", fmt_rate(kmb09_iter(params))),
            ("qber", fmt_rate(kmb09_qber(params))),
            ("eta", fmt_rate(spec.eta())),
            ("eta_evan", fmt_rate(kmb09_eta_evan(params))),
        ]
    else:
        qb = variant_qb(params)
        lines += [
            ("iter", fmt_rate(variant_iter(params))),
            ("qber", fmt_rate(variant_qber(params))),
            ("qb", fmt_rate(qb)),
            ("eta", fmt_rate(spec.eta())),
            ("eta_evan", fmt_rate(qb)),
        ]
    emit(lines)


@cli.command()
@angle_options
@click.option("--grid", type=int, default=None, help="Grid points per angle axis.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Sweep CSV path.")
@click.option("--workers", type=int, default=None, help="Worker threads.")
@handle_errors
def sweep(**flags) -> None:
    """Sweep Evan's basis over the sphere and fit ITER against QBER."""
    config = build_config("sweep", **_drop_unset(flags))
    spec = config.protocol_spec()
    if config.out_path:
        out_path = Path(config.out_path)
    else:
        settings.ensure_directories()
        out_path = settings.output_dir / f"sweep_{config.protocol}_{config.grid}.csv"

    table = sweep_table(spec, config.grid, config.workers)
    write_sweep(table, out_path)
    fit = fit_signature(table)

    lines = [(label, value) for label, value in _config_lines(config)
             if label not in ("theta3_deg", "phi3_deg")]
    lines += [
        ("grid", config.grid),
        ("records", len(table)),
        ("undefined", int(np.count_nonzero(~table.defined))),
        ("qber_min", fmt_rate(fit.qber_min)),
        ("argmin_theta3_deg", fmt_angle(math.degrees(fit.argmin[0]))),
        ("argmin_phi3_deg", fmt_angle(math.degrees(fit.argmin[1]))),
        ("iter_at_min", fmt_rate(fit.iter_at_min)),
        ("eta_evan_at_min", fmt_rate(fit.eta_evan_at_min)),
        ("eta", fmt_rate(table.eta)),
        ("slope", fmt_rate(fit.slope)),
        ("intercept", fmt_rate(fit.intercept)),
        ("r_squared", fmt_rate(fit.r_squared)),
        ("out", out_path),
    ]
    emit(lines)


def _session_lines(config: RunConfig, stats) -> List[Tuple[str, object]]:
    lines = _config_lines(config)
    lines += [
        ("eve", "on" if config.eve else "off"),
        ("noise", fmt_rate(config.noise)),
        ("test_fraction", fmt_rate(config.test_fraction)),
        ("seed", stats.seed),
        ("photons_sent", stats.photons_sent),
        ("key_bits", stats.key_bits),
        ("tested_bits", stats.tested_bits),
        ("final_key_bits", stats.final_key_bits),
        ("wrong_test_bits", stats.wrong_test_bits),
        ("same_basis_tested", stats.same_basis_tested),
        ("index_errors_same_basis", stats.index_errors_same_basis),
        ("discarded_set_miss", stats.discarded_set_miss),
        ("noise_events", stats.noise_events),
        ("est_qber", fmt_estimate(stats.est_qber)),
        ("est_iter", fmt_estimate(stats.est_iter)),
        ("est_efficiency", fmt_estimate(stats.est_efficiency)),
    ]
    return lines


def _run_configured_session(config: RunConfig, trace: bool = False):
    seed = auto_seed() if config.seed is None else config.seed
    return run_session(
        config.protocol_spec(),
        eve=config.eve_strategy(),
        noise=NoiseSpec(config.noise),
        n_photons=config.photons,
        test_fraction=config.test_fraction,
        seed=seed,
        trace=trace,
        max_workers=config.workers,
    )


@cli.command()
@angle_options
@session_options
@click.option("--trace", is_flag=True, help="Write the per-photon trace.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Trace CSV path.")
@handle_errors
def simulate(**flags) -> None:
    """Run one seeded Monte Carlo session and report its statistics."""
    config = build_config("simulate", **_drop_unset(flags))
    result = _run_configured_session(config, trace=config.trace)
    lines = _session_lines(config, result.stats)

    if config.trace:
        if config.out_path:
            out_path = Path(config.out_path)
        else:
            settings.ensure_directories()
            out_path = settings.output_dir / f"trace_{config.protocol}_seed{result.stats.seed}.csv"
        write_trace(result.records, out_path)
        transcript = build_transcript(result.records, config.protocol_spec().kind)
        check_transcript(transcript)
        lines += [("transcript_messages", len(transcript)), ("trace", out_path)]

    emit(lines)


@cli.command()
@angle_options
@session_options
@click.option("--grid", type=int, default=None, help="Grid points per axis for an inline sweep.")
@click.option("--sweep-file", type=click.Path(dir_okay=False), default=None,
              help="Sweep CSV to fit instead of sweeping inline.")
@click.option("--threshold", type=float, default=None, help="Deviation threshold override.")
@click.option("--calibrate", is_flag=True,
              help="Calibrate the threshold on eavesdropper-only sessions.")
@handle_errors
def signature(**flags) -> None:
    """Score a session against the eavesdropping line and give a verdict."""
    config = build_config("signature", **_drop_unset(flags))
    spec = config.protocol_spec()

    if config.sweep_file:
        table = read_sweep(config.sweep_file)
    else:
        table = sweep_table(spec, config.grid, config.workers)
    fit = fit_signature(table)

    stats = _run_configured_session(config).stats
    score = signature_deviation(stats, fit)

    if config.threshold is not None:
        threshold, source = config.threshold, "override"
    elif config.calibrate:
        calibration = calibrate_threshold(
            spec, config.eve_strategy(present=True), fit,
            n_photons=config.photons, test_fraction=config.test_fraction,
            max_workers=config.workers, show_progress=sys.stderr.isatty(),
        )
        threshold, source = calibration.threshold, f"calibrated over {len(calibration.seeds)} seeds"
    else:
        threshold, source = settings.signature_threshold, "settings"

    lines = _session_lines(config, stats)
    lines += [
        ("slope", fmt_rate(fit.slope)),
        ("intercept", fmt_rate(fit.intercept)),
        ("r_squared", fmt_rate(fit.r_squared)),
        ("score", fmt_rate(score)),
        ("threshold", f"{fmt_rate(threshold)} ({source})"),
        ("verdict", classify(score, threshold).value),
    ]
    emit(lines)
