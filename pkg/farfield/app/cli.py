"""cli.py

``farfield`` command line: RIR simulation/shaping/analysis, objective metrics,
scenario sampling and dataset generation.

Command output goes to stdout; logs and the one-line ``error:`` message go to
stderr. Exit codes: 0 ok, 2 validation, 3 I/O, 4 generation failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, NoReturn, Optional, Sequence

from farfield import __version__
from farfield.acoustics.core import DEFAULT_SPEED_OF_SOUND, Position, RoomSpec, eyring_t60
from farfield.analytics.rir_analysis import analyze_rir, estimate_t60
from farfield.analytics.signal_metrics import measured_snr, si_sdr
from farfield.app.audio_io import SUPPORTED_SAMPLE_RATES, read_mono, write_wav
from farfield.app.error_handling import EXIT_OK, ErrorContext, ErrorHandler, exit_code_for, format_error
from farfield.app.logging_config import setup_logging
from farfield.app.reporting import write_report
from farfield.app.schemas import RirStatsSchema, ScenarioInstanceSchema, ShapingSchema, SimulationReport
from farfield.app.settings import Settings, load_settings
from farfield.exceptions import ConfigError, FarfieldError
from farfield.pipeline.config import load_dataset_config
from farfield.pipeline.dataset import MANIFEST_NAME, generate_dataset
from farfield.pipeline.scenarios import SCENARIO_PRESETS, NaiveUniform, VolumeBased, get_scenario, sample_scenario
from farfield.shaping.windows import apply_shaping, shaping_grid
from farfield.simulation.ism import AUTO, DEFAULT_KERNEL_TAPS, DEFAULT_LENGTH_FACTOR, SimRequest, plan_for_t60, simulate
from farfield.simulation.rir import Rir

logger = logging.getLogger(__name__)


class CliArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting so usage errors share the ``error:`` line and exit code 2."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(message)


# --- flag parsing ---

def _vector(flag: str, text: str, size: int = 3) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"{flag}: expected {size} comma-separated numbers, got {text!r}") from None
    if len(values) != size:
        raise ConfigError(f"{flag}: expected {size} comma-separated numbers, got {text!r}")
    return values


def _order(text: str) -> Any:
    if text == AUTO:
        return AUTO
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"--order: expected 'auto' or an integer, got {text!r}") from None


def _emit(payload: str) -> None:
    sys.stdout.write(payload + "\n")


def _load_rir(path: str, direct: str) -> Rir:
    samples, fs = read_mono(path)
    return Rir.from_samples(samples, fs, direct)


# --- rir ---

def cmd_rir_simulate(args: argparse.Namespace) -> int:
    dims = _vector("--room", args.room)
    source = Position.from_sequence(_vector("--src", args.src))
    mic = Position.from_sequence(_vector("--mic", args.mic))
    order = _order(args.order)
    if args.t60 is not None:
        request = plan_for_t60(
            dims,
            source,
            mic,
            args.t60,
            args.fs,
            speed_of_sound=args.speed_of_sound,
            max_rir_seconds=args.length,
            reflection_order=order,
            calibrate=not args.no_calibrate,
        )
    else:
        room = RoomSpec.uniform(dims, args.absorption, args.speed_of_sound)
        length = args.length
        if length is None:
            direct_s = source.distance_to(mic) / args.speed_of_sound
            length = direct_s + DEFAULT_LENGTH_FACTOR * eyring_t60(room) + (DEFAULT_KERNEL_TAPS // 2 + 1) / args.fs
        request = SimRequest(room, source, mic, args.fs, length, reflection_order=order)

    rir = simulate(request)
    write_wav(args.out, rir.samples, rir.sample_rate)
    report = SimulationReport(
        output=str(args.out),
        sample_rate=rir.sample_rate,
        length_samples=len(rir),
        room_dims_m=request.room.dims,
        absorption=request.room.absorption[0],
        t60_target_s=args.t60,
        distance_m=request.distance_m,
        stats=RirStatsSchema.from_stats(analyze_rir(rir)),
    )
    _emit(report.model_dump_json(indent=2))
    return EXIT_OK


def _shaping_from_args(args: argparse.Namespace) -> ShapingSchema:
    t60max = None if args.mode == "nd" else args.t60max_ms
    schema = ShapingSchema(mode=args.mode, offset_ms=args.offset_ms, t60max_ms=t60max)
    schema.to_spec()
    return schema


def cmd_rir_shape(args: argparse.Namespace) -> int:
    schema = _shaping_from_args(args)
    rir = _load_rir(args.input, args.direct)
    shaped = apply_shaping(rir, schema.to_spec(), args.measured_t60)
    write_wav(args.out, shaped.samples, shaped.sample_rate)
    payload = {
        "output": str(args.out),
        "shaping": schema.model_dump(mode="json"),
        "stats": RirStatsSchema.from_stats(analyze_rir(shaped)).model_dump(mode="json"),
    }
    _emit(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_rir_analyze(args: argparse.Namespace) -> int:
    rir = _load_rir(args.path, args.direct)
    _emit(RirStatsSchema.from_stats(analyze_rir(rir)).model_dump_json(indent=2))
    return EXIT_OK


def cmd_rir_sweep(args: argparse.Namespace) -> int:
    rir = _load_rir(args.input, args.direct)
    measured = args.measured_t60
    if args.adaptive and measured is None:
        measured = estimate_t60(rir).t60_s
    out_dir = Path(args.out_dir)
    stem = Path(args.input).stem
    written = []
    for spec in shaping_grid(adaptive=args.adaptive):
        decay = "nd" if spec.t60max_ms is None else f"{spec.t60max_ms:g}"
        path = out_dir / f"{stem}_off{spec.offset_ms:g}_t{decay}.wav"
        shaped = apply_shaping(rir, spec, measured)
        write_wav(path, shaped.samples, shaped.sample_rate)
        written.append({"output": str(path), "shaping": spec.to_dict()})
    _emit(json.dumps(written, indent=2))
    return EXIT_OK


# --- metrics ---

def _pair(first: str, second: str) -> tuple[Any, Any]:
    a, fs_a = read_mono(first)
    b, fs_b = read_mono(second)
    if fs_a != fs_b:
        raise ConfigError(f"sample rates differ: {first} is {fs_a} Hz, {second} is {fs_b} Hz")
    return a, b


def cmd_metrics_si_sdr(args: argparse.Namespace) -> int:
    estimate, reference = _pair(args.estimate, args.reference)
    result = si_sdr(estimate, reference)
    if not result.valid:
        logger.warning("estimate is all zeros; SI-SDR is undefined")
    _emit(result.format(args.precision))
    return EXIT_OK


def cmd_metrics_snr(args: argparse.Namespace) -> int:
    speech, noise = _pair(args.speech, args.noise)
    _emit(f"{measured_snr(speech, noise):.{args.precision}f}")
    return EXIT_OK


# --- scenario ---

def cmd_scenario_sample(args: argparse.Namespace) -> int:
    spec = get_scenario(args.scenario)
    if args.t60_mode == "naive":
        spec = spec.with_t60_mode(NaiveUniform())
    else:
        spec = spec.with_t60_mode(VolumeBased(args.variation))
    for i in range(args.count):
        instance = sample_scenario(spec, args.seed + i)
        _emit(ScenarioInstanceSchema.from_instance(instance).model_dump_json())
    return EXIT_OK


def cmd_scenario_list(args: argparse.Namespace) -> int:
    for spec in SCENARIO_PRESETS.values():
        _emit(json.dumps(asdict(spec)))
    return EXIT_OK


# --- dataset ---

def cmd_dataset_generate(args: argparse.Namespace) -> int:
    config = load_dataset_config(args.config)
    records = generate_dataset(config, args.seed, args.out, workers=args.workers)
    _emit(json.dumps({"examples": len(records), "manifest": str(Path(args.out) / MANIFEST_NAME)}))
    return EXIT_OK


def cmd_dataset_report(args: argparse.Namespace) -> int:
    path = write_report(args.manifest, args.out)
    _emit(str(path))
    return EXIT_OK


def cmd_report_figures(args: argparse.Namespace) -> int:
    # matplotlib is only imported when figures are requested
    from farfield.analytics.figures import write_figures

    for path in write_figures(args.out):
        _emit(str(path))
    return EXIT_OK


# --- parser ---

def _add(sub: Any, name: str, func: Callable[[argparse.Namespace], int], help_text: str) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, help=help_text)
    parser.set_defaults(func=func)
    return parser


def _direct_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--direct", choices=["peak", "threshold"], default="peak", help="Direct-path detection for loaded RIRs")


def build_parser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    settings = settings or Settings()
    parser = CliArgumentParser(prog="farfield", description="Far-field RIR simulation and dereverberation dataset tools")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=CliArgumentParser)

    # rir
    rir = groups.add_parser("rir", help="Simulate, shape and analyse impulse responses")
    rir_cmds = rir.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)

    p = _add(rir_cmds, "simulate", cmd_rir_simulate, "Image-source RIR for a shoebox room")
    p.add_argument("--room", required=True, help="L,W,H in metres")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--t60", type=float, help="Target reverberation time in seconds")
    target.add_argument("--absorption", type=float, help="Uniform wall absorption coefficient")
    p.add_argument("--src", required=True, help="Source x,y,z in metres")
    p.add_argument("--mic", required=True, help="Microphone x,y,z in metres")
    p.add_argument("--fs", type=int, choices=SUPPORTED_SAMPLE_RATES, default=48000)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--length", type=float, help="RIR length in seconds (default: direct delay + 1.5 x T60)")
    p.add_argument("--order", default=AUTO, help="Reflection order cap, or 'auto'")
    p.add_argument("--speed-of-sound", type=float, default=DEFAULT_SPEED_OF_SOUND)
    p.add_argument("--no-calibrate", action="store_true", help="Use the plain Eyring absorption")

    p = _add(rir_cmds, "shape", cmd_rir_shape, "Apply a dereverberation window to an RIR")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--mode", choices=["nd", "const", "adaptive"], default="const")
    p.add_argument("--offset-ms", type=float, default=0.0)
    p.add_argument("--t60max-ms", type=float, default=300.0)
    p.add_argument("--measured-t60", type=float, help="Known T60 for adaptive mode (estimated otherwise)")
    _direct_flag(p)

    p = _add(rir_cmds, "analyze", cmd_rir_analyze, "T60, DRR and C50 of an RIR")
    p.add_argument("path")
    _direct_flag(p)

    p = _add(rir_cmds, "sweep", cmd_rir_sweep, "Write every preset shaping of one RIR")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--adaptive", action="store_true")
    p.add_argument("--measured-t60", type=float)
    _direct_flag(p)

    # metrics
    metrics = groups.add_parser("metrics", help="Objective signal metrics")
    metric_cmds = metrics.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)
    p = _add(metric_cmds, "si-sdr", cmd_metrics_si_sdr, "Scale-invariant SDR in dB")
    p.add_argument("--estimate", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--precision", type=int, default=2)
    p = _add(metric_cmds, "snr", cmd_metrics_snr, "Energy ratio of speech and noise components in dB")
    p.add_argument("--speech", required=True)
    p.add_argument("--noise", required=True)
    p.add_argument("--precision", type=int, default=2)

    # scenario
    scenario = groups.add_parser("scenario", help="Scenario presets and sampling")
    scenario_cmds = scenario.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)
    p = _add(scenario_cmds, "sample", cmd_scenario_sample, "Print sampled scenario instances as JSON lines")
    p.add_argument("--scenario", default="far_large")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--t60-mode", choices=["volume", "naive"], default="volume")
    p.add_argument("--variation", type=float, default=0.2, help="Relative T60 spread for volume mode")
    _add(scenario_cmds, "list", cmd_scenario_list, "Print the scenario presets")

    # dataset
    dataset = groups.add_parser("dataset", help="Generate and summarise datasets")
    dataset_cmds = dataset.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)
    p = _add(dataset_cmds, "generate", cmd_dataset_generate, "Generate input/target pairs and a manifest")
    p.add_argument("config", type=Path)
    p.add_argument("--seed", type=int, help="Master seed (default: the config's master_seed)")
    p.add_argument("--workers", type=int, default=settings.workers, help="Parallel workers (env FARFIELD_WORKERS)")
    p.add_argument("--out", required=True, type=Path)
    p = _add(dataset_cmds, "report", cmd_dataset_report, "Markdown summary of a manifest")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    # report
    report = groups.add_parser("report", help="Static figures")
    report_cmds = report.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)
    p = _add(report_cmds, "figures", cmd_report_figures, "Volume/T60 law and gain-curve plots")
    p.add_argument("--out", required=True, type=Path)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    handler = ErrorHandler()
    try:
        settings = load_settings()
        setup_logging(settings)
        args = build_parser(settings).parse_args(list(argv) if argv is not None else None)
        return int(args.func(args))
    except (FarfieldError, OSError, ValueError) as exc:
        command = " ".join(argv if argv is not None else sys.argv[1:])
        handler.record_error(exc, ErrorContext(command=command, example_index=getattr(exc, "example_index", None)))
        sys.stderr.write(format_error(exc) + "\n")
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
