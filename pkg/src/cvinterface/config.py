"""Scenario files and report documents.

Scenario files are INI-style text (``#`` comments)::

    [source]
    squeezing_db = -8.28          # or pump_x / linewidth_mhz / escape_eff
    antisqueezing_db = 8.28
    [vbs]
    mode = balance                # or t = 0.72
    [arm_1550]
    efficiency_power = 0.88
    [arm_532]
    sfg_efficiency_power = 0.9
    pd_efficiency_power = 0.9
    [detection]
    phase_1550_rad = 0
    phase_532_rad = 0
    [analysis]
    frequency_mhz = 5

Every section is optional; missing values take the defaults of
:class:`~cvinterface.scenario.ScenarioConfig` and the reference source.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import __version__
from .scenario import (
    FixedSource,
    OperatingPoint,
    ScenarioConfig,
    reference_source,
)
from .spectral import FrequencyGrid, SourceSpectrumModel
from .traces import format_number

SCHEMA = {
    "source": {"squeezing_db", "antisqueezing_db", "pump_x", "linewidth_mhz", "escape_eff"},
    "vbs": {"t", "mode"},
    "arm_1550": {"efficiency_power"},
    "arm_532": {"sfg_efficiency_power", "pd_efficiency_power", "extra_power"},
    "detection": {"phase_1550_rad", "phase_532_rad", "dark_floor_db"},
    "analysis": {
        "frequency_mhz",
        "sweep_start_mhz", "sweep_stop_mhz", "sweep_points",
        "phase_start_rad", "phase_stop_rad", "phase_points", "scan_arm",
    },
}
SECTION_ORDER = list(SCHEMA)


class ConfigError(ValueError):
    """Invalid scenario file.

    ``kind`` is one of ``syntax``, ``unknown_section``, ``unknown_key``,
    ``conflict``, ``missing``, ``type`` and ``range``.
    """

    def __init__(self, kind: str, section: str | None, key: str | None, message: str):
        self.kind = kind
        self.section = section
        self.key = key
        where = f"[{section}]" if section else ""
        if key:
            where += f" {key}"
        super().__init__(f"{kind}: {where}: {message}" if where else f"{kind}: {message}")


@dataclass(frozen=True)
class PhaseGrid:
    start: float = 0.0
    stop: float = 2.0 * math.pi
    points: int = 361
    scan_arm: str = "532"

    def phases(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ConfigDocument:
    scenario: ScenarioConfig
    sweep: FrequencyGrid | None = None
    phase_grid: PhaseGrid = field(default_factory=PhaseGrid)


def _reader() -> configparser.ConfigParser:
    return configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None, empty_lines_in_values=False,
    )


class _Section:
    def __init__(self, name: str, items: dict[str, str]):
        self.name = name
        self.items = items

    def has(self, key: str) -> bool:
        return key in self.items

    def float(self, key: str, default=None, lo=None, hi=None):
        if key not in self.items:
            return default
        raw = self.items[key]
        try:
            val = float(raw)
        except ValueError:
            raise ConfigError("type", self.name, key, f"expected a number, got {raw!r}") from None
        if not math.isfinite(val):
            raise ConfigError("range", self.name, key, f"value must be finite, got {raw!r}")
        if (lo is not None and val < lo) or (hi is not None and val > hi):
            raise ConfigError("range", self.name, key, f"value {val} outside [{lo}, {hi}]")
        return val

    def int(self, key: str, default=None, lo=None):
        if key not in self.items:
            return default
        raw = self.items[key]
        try:
            val = int(raw)
        except ValueError:
            raise ConfigError("type", self.name, key, f"expected an integer, got {raw!r}") from None
        if lo is not None and val < lo:
            raise ConfigError("range", self.name, key, f"value {val} below {lo}")
        return val


def parse_document(text: str) -> ConfigDocument:
    parser = _reader()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("syntax", None, None, str(exc).splitlines()[0]) from None
    sections = {}
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError("unknown_section", name, None, "no such section")
        items = dict(parser.items(name))
        for key in items:
            if key not in SCHEMA[name]:
                raise ConfigError("unknown_key", name, key, "no such key")
        sections[name] = _Section(name, items)

    def sec(name):
        return sections.get(name, _Section(name, {}))

    source = _parse_source(sec("source"))

    vbs_sec = sec("vbs")
    if vbs_sec.has("t") and vbs_sec.has("mode"):
        raise ConfigError("conflict", "vbs", "t", "give either t or mode, not both")
    if vbs_sec.has("t"):
        vbs = vbs_sec.float("t", lo=0.0, hi=1.0)
    else:
        vbs = vbs_sec.items.get("mode", "balance")
        if vbs not in ("balance", "optimize"):
            raise ConfigError("range", "vbs", "mode", f"expected balance or optimize, got {vbs!r}")

    eta_1550 = sec("arm_1550").float("efficiency_power", 0.88, 0.0, 1.0)
    arm = sec("arm_532")
    eta_532 = (
        arm.float("sfg_efficiency_power", 0.9, 0.0, 1.0)
        * arm.float("pd_efficiency_power", 0.9, 0.0, 1.0)
        * arm.float("extra_power", 1.0, 0.0, 1.0)
    )

    det = sec("detection")
    an = sec("analysis")
    scenario = ScenarioConfig(
        source=source,
        vbs=vbs,
        eta_532=eta_532,
        eta_1550=eta_1550,
        phase_1550=det.float("phase_1550_rad", 0.0),
        phase_532=det.float("phase_532_rad", 0.0),
        analysis_freq=an.float("frequency_mhz", 5.0, lo=0.0),
        dark_floor_db=det.float("dark_floor_db"),
    )

    sweep_keys = ("sweep_start_mhz", "sweep_stop_mhz", "sweep_points")
    present = [k for k in sweep_keys if an.has(k)]
    sweep = None
    if present:
        if len(present) != 3:
            missing = next(k for k in sweep_keys if not an.has(k))
            raise ConfigError("missing", "analysis", missing, "a sweep needs start, stop and points")
        try:
            sweep = FrequencyGrid(
                an.float("sweep_start_mhz", lo=0.0),
                an.float("sweep_stop_mhz", lo=0.0),
                an.int("sweep_points", lo=2),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("range", "analysis", "sweep_stop_mhz", str(exc)) from None

    scan_arm = an.items.get("scan_arm", "532")
    if scan_arm not in ("532", "1550"):
        raise ConfigError("range", "analysis", "scan_arm", f"expected 532 or 1550, got {scan_arm!r}")
    phase_grid = PhaseGrid(
        an.float("phase_start_rad", 0.0),
        an.float("phase_stop_rad", 2.0 * math.pi),
        an.int("phase_points", 361, lo=2),
        scan_arm,
    )
    return ConfigDocument(scenario, sweep, phase_grid)


def _parse_source(sec: _Section):
    fixed = [k for k in ("squeezing_db", "antisqueezing_db") if sec.has(k)]
    spectral = [k for k in ("pump_x", "linewidth_mhz", "escape_eff") if sec.has(k)]
    if fixed and spectral:
        raise ConfigError(
            "conflict", "source", spectral[0],
            "give either squeezing_db/antisqueezing_db or pump_x/linewidth_mhz, not both",
        )
    if spectral:
        for k in ("pump_x", "linewidth_mhz"):
            if not sec.has(k):
                raise ConfigError("missing", "source", k, "required for a pumped source")
        x = sec.float("pump_x", lo=0.0)
        if x >= 1.0:
            raise ConfigError("range", "source", "pump_x", f"value {x} must be below threshold (1)")
        gamma = sec.float("linewidth_mhz")
        if gamma <= 0:
            raise ConfigError("range", "source", "linewidth_mhz", f"value {gamma} must be positive")
        eta = sec.float("escape_eff", 1.0, 0.0, 1.0)
        if eta == 0:
            raise ConfigError("range", "source", "escape_eff", "value must be positive")
        return SourceSpectrumModel(x, gamma, eta)
    if fixed:
        for k in ("squeezing_db", "antisqueezing_db"):
            if not sec.has(k):
                raise ConfigError("missing", "source", k, "both squeezing levels are required")
        try:
            return FixedSource(sec.float("squeezing_db"), sec.float("antisqueezing_db"))
        except ValueError as exc:
            raise ConfigError("range", "source", "squeezing_db", str(exc)) from None
    return reference_source()


def parse_config(text: str) -> ScenarioConfig:
    return parse_document(text).scenario


def _num(v: float) -> str:
    return repr(float(v))


def serialize_document(doc: ConfigDocument) -> str:
    """Text that :func:`parse_document` maps back to an equal document."""
    cfg = doc.scenario
    lines = ["[source]"]
    src = cfg.source
    if isinstance(src, SourceSpectrumModel):
        lines += [f"pump_x = {_num(src.pump_x)}", f"linewidth_mhz = {_num(src.linewidth_mhz)}",
                  f"escape_eff = {_num(src.escape_eff)}"]
    elif isinstance(src, FixedSource):
        lines += [f"squeezing_db = {_num(src.squeezing_db)}",
                  f"antisqueezing_db = {_num(src.antisqueezing_db)}"]
    else:
        raise TypeError(f"cannot serialise source of type {type(src).__name__}")
    lines += ["", "[vbs]"]
    lines.append(f"mode = {cfg.vbs}" if isinstance(cfg.vbs, str) else f"t = {_num(cfg.vbs)}")
    lines += ["", "[arm_1550]", f"efficiency_power = {_num(cfg.eta_1550)}"]
    lines += ["", "[arm_532]", f"sfg_efficiency_power = {_num(cfg.eta_532)}",
              "pd_efficiency_power = 1.0"]
    lines += ["", "[detection]", f"phase_1550_rad = {_num(cfg.phase_1550)}",
              f"phase_532_rad = {_num(cfg.phase_532)}"]
    if cfg.dark_floor_db is not None:
        lines.append(f"dark_floor_db = {_num(cfg.dark_floor_db)}")
    lines += ["", "[analysis]", f"frequency_mhz = {_num(cfg.analysis_freq)}"]
    if doc.sweep is not None:
        lines += [f"sweep_start_mhz = {_num(doc.sweep.start)}",
                  f"sweep_stop_mhz = {_num(doc.sweep.stop)}",
                  f"sweep_points = {int(doc.sweep.points)}"]
    g = doc.phase_grid
    lines += [f"phase_start_rad = {_num(g.start)}", f"phase_stop_rad = {_num(g.stop)}",
              f"phase_points = {g.points}", f"scan_arm = {g.scan_arm}"]
    return "\n".join(lines) + "\n"


def serialize_config(config: ScenarioConfig) -> str:
    return serialize_document(ConfigDocument(config))


def bundled_config_text(name: str = "reference_defaults") -> str:
    return resources.files("cvinterface.data").joinpath(f"{name}.cfg").read_text()


def reference_defaults() -> ConfigDocument:
    return parse_document(bundled_config_text("reference_defaults"))


def _source_to_dict(src) -> dict:
    if isinstance(src, SourceSpectrumModel):
        return {"type": "spectral", "pump_x": src.pump_x,
                "linewidth_mhz": src.linewidth_mhz, "escape_eff": src.escape_eff}
    return {"type": "fixed", "squeezing_db": src.squeezing_db,
            "antisqueezing_db": src.antisqueezing_db}


def _source_from_dict(d: dict):
    if d["type"] == "spectral":
        return SourceSpectrumModel(d["pump_x"], d["linewidth_mhz"], d["escape_eff"])
    return FixedSource(d["squeezing_db"], d["antisqueezing_db"])


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "source": _source_to_dict(cfg.source),
        "vbs": cfg.vbs,
        "eta_532": cfg.eta_532,
        "eta_1550": cfg.eta_1550,
        "phase_1550": cfg.phase_1550,
        "phase_532": cfg.phase_532,
        "analysis_freq_mhz": cfg.analysis_freq,
        "dark_floor_db": cfg.dark_floor_db,
    }


def scenario_from_dict(d: dict) -> ScenarioConfig:
    return ScenarioConfig(
        source=_source_from_dict(d["source"]),
        vbs=d["vbs"],
        eta_532=d["eta_532"],
        eta_1550=d["eta_1550"],
        phase_1550=d["phase_1550"],
        phase_532=d["phase_532"],
        analysis_freq=d["analysis_freq_mhz"],
        dark_floor_db=d["dark_floor_db"],
    )


@dataclass(frozen=True)
class ReportDocument:
    config: ScenarioConfig
    operating_point: OperatingPoint
    provenance: dict = field(default_factory=dict, hash=False)

    def to_dict(self) -> dict:
        op = self.operating_point
        return {
            "config": scenario_to_dict(self.config),
            "operating_point": op.to_dict(),
            "provenance": {"tool": "cvinterface", "version": __version__, **self.provenance},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        d = json.loads(text)
        prov = {k: v for k, v in d["provenance"].items() if k not in ("tool", "version")}
        return cls(scenario_from_dict(d["config"]),
                   OperatingPoint.from_dict(d["operating_point"]), prov)

    def to_csv(self) -> str:
        """Flat ``key,value`` listing of the report."""
        rows = []

        def walk(prefix, obj):
            if isinstance(obj, dict):
                for k, v in obj.items():
                    walk(f"{prefix}.{k}" if prefix else k, v)
            elif isinstance(obj, bool) or obj is None or isinstance(obj, str):
                rows.append((prefix, "" if obj is None else str(obj).lower()
                             if isinstance(obj, bool) else str(obj)))
            else:
                rows.append((prefix, format_number(obj)))

        walk("", self.to_dict())
        return "key,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
