"""
Scenario description and its plain-text configuration format.

One setting per line::

    # comments start with '#'
    f      = 30 mm
    f_RR   = 3 m
    d      = 8 m
    P_in   = 120 W
    R4     = 2 %
    ofdm.qam_order = 16384
    sweep.variable = d
    sweep.start    = 0.5 m
    sweep.stop     = 12 m
    sweep.steps    = 116

Dimensional quantities must carry a unit; values are converted to SI on
ingestion. Dimensionless fractions accept a bare number or a ``%`` suffix.
Omitted keys take the Nd:YVO4 / LiNbO3 reference values.
"""
from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .link_budget import DetectorSpec
from .ofdm_sim import OfdmConfig
from .optics_matrix import interval_from_f_rr
from .power_chain import ALPHA_AIR, EfficiencyChain, GainMediumSpec, LossBudget, ShgCrystalSpec
from .resonator_modes import ResonatorGeometry

__all__ = [
    "Scenario",
    "SweepSpec",
    "SWEEP_VARIABLES",
    "default_geometry",
    "load_scenario",
    "parse_scenario",
    "dump_scenario",
    "scenario_hash",
    "provenance_lines",
    "apply_override",
]

SWEEP_VARIABLES = ("d", "f_RR", "f", "R4", "P_in")


def default_geometry() -> ResonatorGeometry:
    return ResonatorGeometry.from_f_rr(f=0.03, f_rr=3.0, d=5.0)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidArgumentError(
                f"sweep variable must be one of {', '.join(SWEEP_VARIABLES)}, got {self.variable!r}")
        if self.steps < 2:
            raise InvalidArgumentError("sweep steps must be >= 2")
        lo, hi = sorted((self.start, self.stop))
        if self.variable == "R4" and not (0.0 < lo and hi < 1.0):
            raise InvalidArgumentError("R4 sweep range must lie inside (0, 1)")
        if self.variable in ("f", "f_RR") and lo <= 0:
            raise InvalidArgumentError(f"{self.variable} sweep range must be > 0")
        if self.variable in ("d", "P_in") and lo < 0:
            raise InvalidArgumentError(f"{self.variable} sweep range must be >= 0")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class Scenario:
    geometry: ResonatorGeometry = field(default_factory=default_geometry)
    gain: GainMediumSpec = field(default_factory=GainMediumSpec)
    efficiencies: EfficiencyChain = field(default_factory=EfficiencyChain)
    losses: LossBudget = field(default_factory=LossBudget)
    shg: ShgCrystalSpec = field(default_factory=ShgCrystalSpec)
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    p_in: float = 100.0
    eta_dev: float = 1.0
    papr: float = 1.0
    ofdm: OfdmConfig | None = None
    sweep: SweepSpec | None = None

    def __post_init__(self):
        if self.geometry.wavelength != self.gain.wavelength:
            raise InvalidArgumentError("geometry and gain medium disagree on the wavelength")
        if self.geometry.a_g != self.gain.a_g:
            raise InvalidArgumentError("geometry and gain medium disagree on a_g")
        if self.p_in < 0:
            raise InvalidArgumentError("P_in must be >= 0")
        if not 0.0 < self.eta_dev <= 1.0:
            raise InvalidArgumentError("eta_dev must be in (0, 1]")
        if self.papr < 1.0:
            raise InvalidArgumentError("papr must be >= 1")

    def ofdm_config(self) -> OfdmConfig:
        return self.ofdm if self.ofdm is not None else OfdmConfig(bandwidth=self.detector.bandwidth)

    def with_value(self, name: str, value: float) -> "Scenario":
        """Copy with one sweepable quantity changed.

        Changing ``f`` keeps f_RR fixed (the lens interval follows), which is
        how the resonator is parameterised in the sweeps.
        """
        g = self.geometry
        if name == "d":
            return replace(self, geometry=replace(g, d=float(value)))
        if name == "f_RR":
            return replace(self, geometry=replace(g, l=interval_from_f_rr(g.f, float(value))))
        if name == "f":
            return replace(self, geometry=replace(g, f=float(value), l=interval_from_f_rr(float(value), g.f_rr)))
        if name == "R4":
            return replace(self, losses=replace(self.losses, R4=float(value)))
        if name == "P_in":
            return replace(self, p_in=float(value))
        raise InvalidArgumentError(f"unknown sweep variable {name!r}")


# --- units ------------------------------------------------------------------

_MICRO = ("u", "µ", "μ")


def _with_micro(base: dict[str, float], stem: str, scale: float) -> dict[str, float]:
    return {**base, **{p + stem: scale for p in _MICRO}}


UNITS: dict[str, dict[str, float]] = {
    "length": _with_micro({"m": 1.0, "cm": 1e-2, "mm": 1e-3, "nm": 1e-9, "km": 1e3}, "m", 1e-6),
    "time": _with_micro({"s": 1.0, "ms": 1e-3, "ns": 1e-9}, "s", 1e-6),
    "area": {"m^2": 1.0, "m2": 1.0, "cm^2": 1e-4, "cm2": 1e-4, "mm^2": 1e-6, "mm2": 1e-6},
    "volume": {"m^3": 1.0, "m3": 1.0, "cm^3": 1e-6, "cm3": 1e-6, "mm^3": 1e-9, "mm3": 1e-9},
    "power": {"W": 1.0, "mW": 1e-3, "kW": 1e3},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "current": _with_micro({"A": 1.0, "mA": 1e-3, "nA": 1e-9}, "A", 1e-6),
    "temperature": {"K": 1.0},
    "resistance": {"ohm": 1.0, "Ohm": 1.0, "Ω": 1.0, "kohm": 1e3, "kOhm": 1e3, "kΩ": 1e3,
                   "Mohm": 1e6, "MOhm": 1e6, "MΩ": 1e6},
    "nonlinear": {"m/V": 1.0, "pm/V": 1e-12},
    "inv_length": {"1/m": 1.0, "m^-1": 1.0, "1/km": 1e-3, "km^-1": 1e-3},
    "responsivity": {"A/W": 1.0, "mA/W": 1e-3},
}

# unit written by dump_scenario for each dimension
SI_UNIT = {
    "length": "m", "time": "s", "area": "m^2", "volume": "m^3", "power": "W",
    "frequency": "Hz", "current": "A", "temperature": "K", "resistance": "ohm",
    "nonlinear": "m/V", "inv_length": "1/m", "responsivity": "A/W",
}


def _positive(v):
    return None if v > 0 else "must be > 0"


def _nonneg(v):
    return None if v >= 0 else "must be >= 0"


def _unit_interval(v):
    return None if 0 < v <= 1 else "must be in (0, 1]"


def _reflectivity(v):
    return None if 0 <= v < 1 else "must be in [0, 1)"


def _at_least_one(v):
    return None if v >= 1 else "must be >= 1"


@dataclass(frozen=True)
class _Key:
    dim: str  # a UNITS key, or "fraction", "number", "int", "str", "optional_number"
    check: Callable | None = None


KEYS: dict[str, _Key] = {
    "f": _Key("length", _positive),
    "f_RR": _Key("length", _positive),
    "l": _Key("length", _nonneg),
    "d": _Key("length", _nonneg),
    "lambda": _Key("length", _positive),
    "a_g": _Key("length", _positive),
    "sigma_s": _Key("area", _positive),
    "tau_f": _Key("time", _positive),
    "l_g": _Key("length", _positive),
    "V": _Key("volume", _positive),
    "eta_P": _Key("fraction", _unit_interval),
    "eta_t": _Key("fraction", _unit_interval),
    "eta_a": _Key("fraction", _unit_interval),
    "eta_Q": _Key("fraction", _unit_interval),
    "eta_S": _Key("fraction", _unit_interval),
    "eta_B": _Key("fraction", _unit_interval),
    "R4": _Key("fraction", _reflectivity),
    "gamma_RR1": _Key("fraction", _unit_interval),
    "gamma_RR2": _Key("fraction", _unit_interval),
    "gamma_g": _Key("fraction", _unit_interval),
    "gamma_diff": _Key("fraction", _unit_interval),
    "alpha_air": _Key("inv_length", _nonneg),
    "d_eff": _Key("nonlinear", _positive),
    "n0": _Key("number", _positive),
    "l_s": _Key("length", _positive),
    "responsivity": _Key("responsivity", _positive),
    "bandwidth": _Key("frequency", _positive),
    "T": _Key("temperature", _positive),
    "R_L": _Key("resistance", _positive),
    "I_bk": _Key("current", _nonneg),
    "P_in": _Key("power", _nonneg),
    "eta_dev": _Key("fraction", _unit_interval),
    "papr": _Key("number", _at_least_one),
    "ofdm.qam_order": _Key("int", _positive),
    "ofdm.n_subcarriers": _Key("int", _positive),
    "ofdm.fft_len": _Key("int", _positive),
    "ofdm.cp_len": _Key("int", _nonneg),
    "ofdm.bandwidth": _Key("frequency", _positive),
    "ofdm.clip_ratio": _Key("optional_number", _positive),
    "ofdm.dc_bias": _Key("optional_number", _nonneg),
    "ofdm.mode": _Key("str"),
    "sweep.variable": _Key("str"),
    "sweep.start": _Key("sweep"),
    "sweep.stop": _Key("sweep"),
    "sweep.steps": _Key("int"),
}

# dimension of each sweepable variable, for sweep.start / sweep.stop
_SWEEP_DIM = {"d": "length", "f_RR": "length", "f": "length", "R4": "fraction", "P_in": "power"}

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_VALUE_RE = re.compile(rf"^\s*({_NUM})\s*(.*?)\s*$")


def _convert(key: str, dim: str, text: str, line: int | None):
    if dim == "str":
        if not text:
            raise ConfigError("empty value", key, line)
        return text
    if dim == "optional_number" and text.lower() in ("none", "off"):
        return None
    m = _VALUE_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse value {text!r}", key, line)
    number, unit = m.group(1), m.group(2)
    if dim == "int":
        if unit or not re.fullmatch(r"[-+]?\d+", number):
            raise ConfigError(f"expected an integer, got {text!r}", key, line)
        return int(number)
    value = float(number)
    if dim in ("number", "optional_number"):
        if unit:
            raise ConfigError(f"takes no unit, got {unit!r}", key, line)
        return value
    if dim == "fraction":
        if unit == "%":
            return value / 100.0
        if unit:
            raise ConfigError(f"expected a bare fraction or '%', got unit {unit!r}", key, line)
        return value
    table = UNITS[dim]
    if not unit:
        raise ConfigError(f"missing unit (expected one of: {', '.join(sorted(table))})", key, line)
    if unit not in table:
        raise ConfigError(f"unit {unit!r} is not a {dim} unit", key, line)
    return value * table[unit]


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse configuration text into a validated :class:`Scenario`."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value' in {source}", None, lineno)
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in raw:
            raise ConfigError(f"duplicate key (first set on line {raw[key][1]})", key, lineno)
        raw[key] = (value, lineno)

    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for key, (text_value, lineno) in raw.items():
        spec = KEYS[key]
        if spec.dim == "sweep":
            continue
        v = _convert(key, spec.dim, text_value, lineno)
        if spec.check is not None and v is not None:
            problem = spec.check(v)
            if problem:
                raise ConfigError(f"value {text_value!r} out of range: {problem}", key, lineno)
        values[key] = v
        lines[key] = lineno
    if any(k.startswith("sweep.") for k in raw) and "sweep.variable" not in raw:
        first = min(raw[k][1] for k in raw if k.startswith("sweep."))
        raise ConfigError("incomplete sweep, missing sweep.variable", "sweep.variable", first)
    if "sweep.variable" in values:
        var = values["sweep.variable"]
        if var not in _SWEEP_DIM:
            raise ConfigError(f"must be one of {', '.join(SWEEP_VARIABLES)}",
                              "sweep.variable", lines["sweep.variable"])
        for key in ("sweep.start", "sweep.stop"):
            if key in raw:
                values[key] = _convert(key, _SWEEP_DIM[var], *raw[key])
                lines[key] = raw[key][1]
    return _build(values, lines)


def _build(values: dict, lines: dict) -> Scenario:
    def get(key, default):
        return values.get(key, default)

    if "f_RR" in values and "l" in values:
        raise ConfigError("give either f_RR or l, not both", "l", lines["l"])

    wavelength = get("lambda", 1064e-9)
    a_g = get("a_g", 3e-3)
    f = get("f", 0.03)
    if "l" in values:
        l = values["l"]
    else:
        l = interval_from_f_rr(f, get("f_RR", 3.0))

    def guarded(section: str, keys: tuple[str, ...], build):
        try:
            return build()
        except InvalidArgumentError as exc:
            present = [k for k in keys if k in lines]
            key = present[0] if present else section
            raise ConfigError(str(exc), key, lines.get(key)) from None

    geometry = guarded("geometry", ("d", "f", "f_RR", "l", "lambda", "a_g"), lambda: ResonatorGeometry(
        f=f, l=l, d=get("d", 5.0), wavelength=wavelength, a_g=a_g))
    gain = GainMediumSpec(sigma_s=get("sigma_s", 15.6e-23), tau_f=get("tau_f", 100e-6),
                          wavelength=wavelength, a_g=a_g, l_g=get("l_g", 1e-3),
                          volume=values.get("V"))
    eff = EfficiencyChain(**{k: get(k, getattr(EfficiencyChain, k)) for k in
                             ("eta_P", "eta_t", "eta_a", "eta_Q", "eta_S", "eta_B")})
    losses = LossBudget(R4=get("R4", 0.02), gamma_RR1=get("gamma_RR1", 1.0),
                        gamma_RR2=get("gamma_RR2", 1.0), gamma_g=get("gamma_g", 1.0),
                        gamma_diff=values.get("gamma_diff"), alpha_air=get("alpha_air", ALPHA_AIR))
    shg = ShgCrystalSpec(d_eff=get("d_eff", 4.7e-12), n0=get("n0", 2.23), l_s=get("l_s", 2e-3))
    detector = DetectorSpec(responsivity=get("responsivity", 0.6), bandwidth=get("bandwidth", 800e6),
                            temperature=get("T", 295.0), load_resistance=get("R_L", 10e3),
                            background_current=get("I_bk", 5100e-6))

    ofdm = None
    ofdm_keys = tuple(k for k in KEYS if k.startswith("ofdm."))
    if any(k in values for k in ofdm_keys):
        d = OfdmConfig()
        ofdm = guarded("ofdm", ofdm_keys, lambda: OfdmConfig(
            qam_order=get("ofdm.qam_order", d.qam_order),
            n_subcarriers=get("ofdm.n_subcarriers", d.n_subcarriers),
            fft_len=get("ofdm.fft_len", d.fft_len),
            cp_len=get("ofdm.cp_len", d.cp_len),
            bandwidth=get("ofdm.bandwidth", detector.bandwidth),
            clip_ratio=get("ofdm.clip_ratio", d.clip_ratio),
            dc_bias=get("ofdm.dc_bias", d.dc_bias),
            mode=get("ofdm.mode", d.mode)))

    sweep = None
    sweep_keys = ("sweep.variable", "sweep.start", "sweep.stop", "sweep.steps")
    if any(k in values for k in sweep_keys):
        missing = [k for k in sweep_keys if k not in values]
        if missing:
            raise ConfigError(f"incomplete sweep, missing {', '.join(missing)}", missing[0], None)
        sweep = guarded("sweep", sweep_keys, lambda: SweepSpec(
            values["sweep.variable"], values["sweep.start"], values["sweep.stop"], values["sweep.steps"]))

    return guarded("scenario", ("P_in", "eta_dev", "papr"), lambda: Scenario(
        geometry=geometry, gain=gain, efficiencies=eff, losses=losses, shg=shg, detector=detector,
        p_in=get("P_in", 100.0), eta_dev=get("eta_dev", 1.0), papr=get("papr", 1.0),
        ofdm=ofdm, sweep=sweep))


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text, source=str(path))


def apply_override(sc: Scenario, assignment: str) -> Scenario:
    """Copy of ``sc`` with one ``key = value`` setting replaced.

    Overriding ``f`` keeps f_RR fixed, as :meth:`Scenario.with_value` does.
    """
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} must look like key=value")
    key = assignment.split("=", 1)[0].strip()
    if key not in KEYS:
        raise ConfigError("unknown key", key)
    drop = {key}
    extra = []
    if key in ("f", "f_RR", "l"):
        drop |= {"l", "f_RR"}
        if key == "f":
            f_rr = sc.geometry.f_rr
            extra.append(f"f_RR = {_fmt(f_rr)} m" if math.isfinite(f_rr) else
                         f"l = {_fmt(sc.geometry.l)} m")
    lines = [ln for ln in dump_scenario(sc).splitlines()
             if ln.split("=", 1)[0].strip() not in drop]
    try:
        return parse_scenario("\n".join(lines + extra + [assignment]), source="--set")
    except ConfigError as exc:
        # line numbers of the synthesised text mean nothing to the caller
        raise ConfigError(f"{exc.reason} (in --set {assignment!r})", exc.key) from None


def _fmt(v: float) -> str:
    return repr(float(v))


def dump_scenario(sc: Scenario) -> str:
    """Serialise to the configuration format in SI units; exact round trip."""
    g = sc.geometry
    out = [
        f"f = {_fmt(g.f)} m",
        f"l = {_fmt(g.l)} m",
        f"d = {_fmt(g.d)} m",
        f"lambda = {_fmt(g.wavelength)} m",
        f"a_g = {_fmt(g.a_g)} m",
        f"sigma_s = {_fmt(sc.gain.sigma_s)} m^2",
        f"tau_f = {_fmt(sc.gain.tau_f)} s",
        f"l_g = {_fmt(sc.gain.l_g)} m",
    ]
    if sc.gain.volume is not None:
        out.append(f"V = {_fmt(sc.gain.volume)} m^3")
    for fld in fields(EfficiencyChain):
        out.append(f"{fld.name} = {_fmt(getattr(sc.efficiencies, fld.name))}")
    ls = sc.losses
    out += [
        f"R4 = {_fmt(ls.R4)}",
        f"gamma_RR1 = {_fmt(ls.gamma_RR1)}",
        f"gamma_RR2 = {_fmt(ls.gamma_RR2)}",
        f"gamma_g = {_fmt(ls.gamma_g)}",
    ]
    if ls.gamma_diff is not None:
        out.append(f"gamma_diff = {_fmt(ls.gamma_diff)}")
    out += [
        f"alpha_air = {_fmt(ls.alpha_air)} 1/m",
        f"d_eff = {_fmt(sc.shg.d_eff)} m/V",
        f"n0 = {_fmt(sc.shg.n0)}",
        f"l_s = {_fmt(sc.shg.l_s)} m",
        f"responsivity = {_fmt(sc.detector.responsivity)} A/W",
        f"bandwidth = {_fmt(sc.detector.bandwidth)} Hz",
        f"T = {_fmt(sc.detector.temperature)} K",
        f"R_L = {_fmt(sc.detector.load_resistance)} ohm",
        f"I_bk = {_fmt(sc.detector.background_current)} A",
        f"P_in = {_fmt(sc.p_in)} W",
        f"eta_dev = {_fmt(sc.eta_dev)}",
        f"papr = {_fmt(sc.papr)}",
    ]
    if sc.ofdm is not None:
        o = sc.ofdm
        out += [
            f"ofdm.qam_order = {o.qam_order}",
            f"ofdm.n_subcarriers = {o.n_subcarriers}",
            f"ofdm.fft_len = {o.fft_len}",
            f"ofdm.cp_len = {o.cp_len}",
            f"ofdm.bandwidth = {_fmt(o.bandwidth)} Hz",
            f"ofdm.clip_ratio = {'none' if o.clip_ratio is None else _fmt(o.clip_ratio)}",
            f"ofdm.dc_bias = {'none' if o.dc_bias is None else _fmt(o.dc_bias)}",
            f"ofdm.mode = {o.mode}",
        ]
    if sc.sweep is not None:
        s = sc.sweep
        dim = _SWEEP_DIM[s.variable]
        unit = f" {SI_UNIT[dim]}" if dim in SI_UNIT else ""
        out += [
            f"sweep.variable = {s.variable}",
            f"sweep.start = {_fmt(s.start)}{unit}",
            f"sweep.stop = {_fmt(s.stop)}{unit}",
            f"sweep.steps = {s.steps}",
        ]
    return "\n".join(out) + "\n"


def scenario_hash(sc: Scenario) -> str:
    return hashlib.sha256(dump_scenario(sc).encode("utf-8")).hexdigest()[:16]


def provenance_lines(sc: Scenario) -> list[str]:
    """Banner echoing the derived quantities and the scenario hash."""
    g = sc.geometry
    return [
        f"scenario sha256:{scenario_hash(sc)}",
        f"f = {g.f!r} m, l = {g.l!r} m, f_RR = {g.f_rr!r} m, d = {g.d!r} m",
        f"V = {sc.gain.V!r} m^3, eta_c = {sc.efficiencies.combined!r}",
        f"P_in = {sc.p_in!r} W, R4 = {sc.losses.R4!r}",
    ]
