"""Command-line front end.

Exit codes: 0 success, 2 configuration or argument error, 3 infeasible
calibration, 4 input/output failure. Output files are written to a temporary
file and renamed into place, so a failed run leaves nothing behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigDocument, ConfigError, ReportDocument, bundled_config_text, parse_document
from .mc_oracle import scan_with_noise
from .scenario import evaluate, optimize_vbs, phase_scan
from .spectral import (
    CalibrationInfeasible,
    FrequencyGrid,
    calibrate_to_landmarks,
    spectrum_sweep,
    xsum_db,
)
from .traces import format_number

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

BUILTINS = ("reference_defaults", "reference_spectral")

EPILOG = """\
exit codes:
  0  success
  2  configuration or argument error
  3  infeasible calibration targets
  4  input/output failure
"""


class _IOFailure(Exception):
    pass


def _load(args) -> ConfigDocument:
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise _IOFailure(f"cannot read {args.config}: {exc.strerror or exc}") from None
    else:
        text = bundled_config_text(args.builtin)
    return parse_document(text)


def _emit(args, text: str) -> None:
    data = text.encode("utf-8")
    if args.out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    out = Path(args.out)
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(dir=out.parent if str(out.parent) else ".",
                                   prefix=f".{out.name}.", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, out)
    except OSError as exc:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)
        raise _IOFailure(f"cannot write {args.out}: {exc.strerror or exc}") from None


def _kv_csv(d: dict) -> str:
    rows = []
    for k, v in d.items():
        if isinstance(v, str):
            rows.append(f"{k},{v}")
        else:
            rows.append(f"{k},{format_number(v)}")
    return "key,value\n" + "\n".join(rows) + "\n"


def _report(args, doc: ConfigDocument, op) -> str:
    report = ReportDocument(doc.scenario, op, {"command": args.command})
    return report.to_csv() if args.format == "csv" else report.to_json()


def _trace(args, trace) -> str:
    return trace.to_json() if args.format == "json" else trace.to_csv()


def cmd_evaluate(args) -> str:
    doc = _load(args)
    return _report(args, doc, evaluate(doc.scenario))


def cmd_optimize(args) -> str:
    doc = _load(args)
    return _report(args, doc, optimize_vbs(doc.scenario))


def _phase_grid(args, doc):
    g = doc.phase_grid
    start = g.start if args.phase_start is None else args.phase_start
    stop = g.stop if args.phase_stop is None else args.phase_stop
    points = g.points if args.phase_points is None else args.phase_points
    if points < 2:
        raise ConfigError("range", None, None, "--phase-points must be at least 2")
    arm = args.scan_arm or g.scan_arm
    return np.linspace(start, stop, points), arm


def cmd_phase_scan(args) -> str:
    doc = _load(args)
    phases, arm = _phase_grid(args, doc)
    return _trace(args, phase_scan(doc.scenario, phases, arm))


def cmd_sample(args) -> str:
    doc = _load(args)
    phases, arm = _phase_grid(args, doc)
    if args.samples < 2:
        raise ConfigError("range", None, None, "--samples must be at least 2")
    if not 0 <= args.seed < 2 ** 64:
        raise ConfigError("range", None, None, "--seed must be a 64-bit unsigned integer")
    return _trace(args, scan_with_noise(doc.scenario, phases, args.samples, args.seed, arm))


def cmd_spectrum(args) -> str:
    doc = _load(args)
    base = doc.sweep or FrequencyGrid(0.5, 40.0, 80)
    try:
        grid = FrequencyGrid(
            base.start if args.start is None else args.start,
            base.stop if args.stop is None else args.stop,
            base.points if args.points is None else args.points,
        )
    except ValueError as exc:
        raise ConfigError("range", None, None, str(exc)) from None
    return _trace(args, spectrum_sweep(doc.scenario, grid))


def cmd_calibrate(args) -> str:
    doc = _load(args)
    model = calibrate_to_landmarks(args.target_db, args.ref_mhz, args.crossing_db,
                                   args.crossing_mhz, doc.scenario, args.escape_eff)
    result = {
        "pump_x": model.pump_x,
        "linewidth_mhz": model.linewidth_mhz,
        "escape_eff": model.escape_eff,
        "ref_mhz": args.ref_mhz,
        "xsum_db_at_ref": xsum_db(doc.scenario, model, args.ref_mhz),
        "crossing_mhz": args.crossing_mhz,
        "xsum_db_at_crossing": xsum_db(doc.scenario, model, args.crossing_mhz),
    }
    if args.format == "csv":
        return _kv_csv(result)
    return json.dumps(result, indent=2) + "\n"


COMMANDS = {
    "evaluate": (cmd_evaluate, "Duan sum and points A-D at the configured operating point", "json"),
    "optimize": (cmd_optimize, "VBS setting minimising the Duan sum", "json"),
    "phase-scan": (cmd_phase_scan, "joint noise while one detector phase is swept", "csv"),
    "spectrum": (cmd_spectrum, "X-sum and P-difference noise versus sideband frequency", "csv"),
    "calibrate": (cmd_calibrate, "fit the OPA source to two spectral landmarks", "json"),
    "sample": (cmd_sample, "Monte-Carlo phase scan with error bars", "csv"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cvinterface", epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Gaussian model of an up-conversion entanglement link.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text, _) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text, description=help_text, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        src = s.add_mutually_exclusive_group()
        src.add_argument("--config", metavar="PATH", help="scenario file")
        src.add_argument("--builtin", choices=BUILTINS, default="reference_defaults",
                         help="bundled scenario used when --config is absent (default: %(default)s)")
        s.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"))
        if name in ("phase-scan", "sample"):
            s.add_argument("--phase-start", type=float, metavar="RAD")
            s.add_argument("--phase-stop", type=float, metavar="RAD")
            s.add_argument("--phase-points", type=int, metavar="N")
            s.add_argument("--scan-arm", choices=("532", "1550"))
        if name == "sample":
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--samples", type=int, default=100_000, metavar="N")
        if name == "spectrum":
            s.add_argument("--start", type=float, metavar="MHZ")
            s.add_argument("--stop", type=float, metavar="MHZ")
            s.add_argument("--points", type=int, metavar="N")
        if name == "calibrate":
            s.add_argument("--target-db", type=float, default=-5.5)
            s.add_argument("--ref-mhz", type=float, default=5.0)
            s.add_argument("--crossing-db", type=float, default=-3.0)
            s.add_argument("--crossing-mhz", type=float, default=20.0)
            s.add_argument("--escape-eff", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func, _, default_format = COMMANDS[args.command]
    if args.format is None:
        args.format = default_format
    try:
        text = func(args)
        _emit(args, text)
    except _IOFailure as exc:
        print(f"cvinterface: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CalibrationInfeasible as exc:
        print(f"cvinterface: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"cvinterface: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
