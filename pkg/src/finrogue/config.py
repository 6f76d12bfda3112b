"""Line-based ``key = value`` scenario configuration.

Keys are dot-namespaced (``params.sigma``, ``grid.n_s`` ...), ``#`` starts a
comment, and later assignments of the same key win. Parsing checks syntax and
per-key types; :func:`build_config` then applies defaults and cross-field
validation, reporting every missing required key at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .bs_baseline import BsParams
from .model import MarketParams, ParameterError, SpaceTimeGrid, is_power_of_two
from .verify import admissible_k


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        prefix += f"{key}: " if key else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line


ANALYTIC = ("plane", "rogon1", "rogon2")
SOLUTIONS = ANALYTIC + ("simulate", "mi", "bs")
NORMALIZATIONS = ("global-minmax", "fixed")


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true/false")


def _choice(options: tuple[str, ...]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _parse_str(text: str) -> str:
    if not text:
        raise ValueError("must be non-empty")
    return text


REQUIRED = object()

# key -> (parser, default); REQUIRED keys are required only for the solutions
# listed in _REQUIRED_FOR.
SCHEMA: dict[str, tuple[Callable[[str], object], object]] = {
    "solution": (_choice(SOLUTIONS), REQUIRED),
    "params.sigma": (_parse_float, REQUIRED),
    "params.beta": (_parse_float, REQUIRED),
    "params.alpha": (_parse_float, REQUIRED),
    "params.k": (_parse_float, REQUIRED),
    "grid.s_min": (_parse_float, REQUIRED),
    "grid.s_max": (_parse_float, REQUIRED),
    "grid.n_s": (_parse_int, REQUIRED),
    "grid.t_min": (_parse_float, REQUIRED),
    "grid.t_max": (_parse_float, REQUIRED),
    "grid.n_t": (_parse_int, REQUIRED),
    "verify.s_min": (_parse_float, -60.0),
    "verify.s_max": (_parse_float, 60.0),
    "verify.n_s": (_parse_int, 4096),
    "verify.n_t": (_parse_int, 7),
    "verify.dt_probe": (_parse_float, 1e-3),
    "verify.boundary_correction": (_parse_bool, True),
    "sim.initial": (_choice(ANALYTIC), REQUIRED),
    "sim.dt": (_parse_float, REQUIRED),
    "sim.reference": (_parse_bool, True),
    "mi.l": (_parse_float, REQUIRED),
    "mi.n_s": (_parse_int, REQUIRED),
    "mi.eps": (_parse_float, REQUIRED),
    "mi.m_pert": (_parse_int, REQUIRED),
    "mi.t_end": (_parse_float, REQUIRED),
    "mi.dt": (_parse_float, REQUIRED),
    "mi.seed": (_parse_int, 0),
    "mi.noise": (_parse_float, 0.0),
    "bs.r": (_parse_float, REQUIRED),
    "bs.sigma": (_parse_float, REQUIRED),
    "bs.strike": (_parse_float, REQUIRED),
    "bs.maturity": (_parse_float, REQUIRED),
    "bs.s_min": (_parse_float, 50.0),
    "bs.s_max": (_parse_float, 150.0),
    "bs.n_s": (_parse_int, 101),
    "bs.bump": (_parse_float, 1e-3),
    "render.normalization": (_choice(NORMALIZATIONS), "global-minmax"),
    "render.lo": (_parse_float, None),
    "render.hi": (_parse_float, None),
    "output.csv": (_parse_str, "field.csv"),
    "output.image": (_parse_str, "field.pgm"),
    "output.report": (_parse_str, "report.csv"),
    "run.workers": (_parse_int, 1),
}

_PARAMS = ("params.sigma", "params.beta", "params.alpha", "params.k")
_GRID = ("grid.s_min", "grid.s_max", "grid.n_s", "grid.t_min", "grid.t_max", "grid.n_t")
_REQUIRED_FOR: dict[str, tuple[str, ...]] = {
    "plane": _PARAMS + _GRID,
    "rogon1": _PARAMS + _GRID,
    "rogon2": _PARAMS + _GRID,
    "simulate": _PARAMS + _GRID + ("sim.initial", "sim.dt"),
    "mi": _PARAMS + ("mi.l", "mi.n_s", "mi.eps", "mi.m_pert", "mi.t_end", "mi.dt"),
    "bs": ("bs.r", "bs.sigma", "bs.strike", "bs.maturity"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario; ``values`` maps every key in use to its typed value."""

    values: Mapping[str, object]

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def solution(self) -> str:
        return self.values["solution"]

    @property
    def params(self) -> MarketParams:
        v = self.values
        return MarketParams(v["params.sigma"], v["params.beta"], v["params.alpha"], v["params.k"])

    @property
    def grid(self) -> SpaceTimeGrid:
        v = self.values
        return SpaceTimeGrid(v["grid.s_min"], v["grid.s_max"], v["grid.n_s"], v["grid.t_min"], v["grid.t_max"], v["grid.n_t"])

    @property
    def verify_grid(self) -> SpaceTimeGrid:
        v = self.values
        return SpaceTimeGrid(v["verify.s_min"], v["verify.s_max"], v["verify.n_s"], v["grid.t_min"], v["grid.t_max"], v["verify.n_t"])

    @property
    def bs_params(self) -> BsParams:
        v = self.values
        return BsParams(v["bs.r"], v["bs.sigma"], v["bs.strike"], v["bs.maturity"])

    @property
    def normalization(self) -> tuple:
        v = self.values
        if v["render.normalization"] == "fixed":
            return ("fixed", v["render.lo"], v["render.hi"])
        return ("global-minmax",)


def parse_assignments(text: str) -> list[tuple[str, str, int]]:
    """Split config text into ``(key, raw value, line number)`` triples."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", line=lineno)
        out.append((key, value, lineno))
    return out


def _convert(key: str, value: str, line: int | None) -> object:
    if key not in SCHEMA:
        raise ConfigError("unknown key", key=key, line=line)
    parser = SCHEMA[key][0]
    try:
        return parser(value)
    except ValueError as exc:
        raise ConfigError(f"invalid value {value!r} ({exc})", key=key, line=line) from None


def parse_overrides(items: Iterable[str]) -> list[tuple[str, str, None]]:
    out = []
    for item in items:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        _convert(key, value, None)
        out.append((key, value, None))
    return out


def build_config(assignments: Iterable[tuple[str, str, int | None]]) -> ScenarioConfig:
    typed: dict[str, object] = {}
    for key, value, line in assignments:
        typed[key] = _convert(key, value, line)

    solution = typed.get("solution")
    needed = ("solution",) + _REQUIRED_FOR.get(solution, _REQUIRED_FOR["rogon1"])
    missing = [key for key in needed if key not in typed]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    values: dict[str, object] = {}
    for key, (_, default) in SCHEMA.items():
        if key in typed:
            values[key] = typed[key]
        elif default is not REQUIRED and default is not None:
            values[key] = default
    config = ScenarioConfig(values)
    _validate(config)
    return config


def parse_config(text: str, overrides: Iterable[str] = ()) -> ScenarioConfig:
    return build_config(parse_assignments(text) + parse_overrides(overrides))


def _validate(c: ScenarioConfig) -> None:
    v = c.values
    sol = c.solution
    if sol != "bs":
        try:
            c.params
        except ParameterError as exc:
            raise ConfigError(str(exc), key="params.sigma/params.beta") from None
    if sol in ANALYTIC or sol == "simulate":
        try:
            g = c.grid
        except ParameterError as exc:
            raise ConfigError(str(exc), key="grid") from None
        if sol in ANALYTIC:
            try:
                vg = c.verify_grid
            except ParameterError as exc:
                raise ConfigError(str(exc), key="verify") from None
            if not is_power_of_two(vg.n_s) or vg.n_s < 8:
                raise ConfigError("must be a power of two >= 8", key="verify.n_s")
            if not v["verify.dt_probe"] > 0.0:
                raise ConfigError("must be positive", key="verify.dt_probe")
        if sol == "simulate":
            if not is_power_of_two(g.n_s) or g.n_s < 8:
                raise ConfigError("must be a power of two >= 8 for propagation", key="grid.n_s")
            if g.s_min != -g.s_max:
                raise ConfigError("propagation domains are centered: need s_min = -s_max", key="grid.s_min")
            if v["sim.dt"] == 0.0:
                raise ConfigError("must be non-zero", key="sim.dt")
            k = v["params.k"]
            if abs(k - admissible_k(k, g.length)) > 1e-12 * max(1.0, abs(k)):
                raise ConfigError(
                    f"propagation needs k = 2*pi*m/L; nearest admissible value is {admissible_k(k, g.length)!r}",
                    key="params.k",
                )
    if sol == "mi":
        if not v["mi.l"] > 0.0:
            raise ConfigError("must be positive", key="mi.l")
        if not is_power_of_two(v["mi.n_s"]) or v["mi.n_s"] < 8:
            raise ConfigError("must be a power of two >= 8", key="mi.n_s")
        if not v["mi.dt"] > 0.0 or not v["mi.t_end"] > 0.0:
            raise ConfigError("must be positive", key="mi.dt")
    if sol == "bs":
        try:
            c.bs_params
        except ParameterError as exc:
            raise ConfigError(str(exc), key="bs") from None
        if not 0.0 < v["bs.s_min"] < v["bs.s_max"] or v["bs.n_s"] < 2:
            raise ConfigError("need 0 < bs.s_min < bs.s_max and bs.n_s >= 2", key="bs.s_min")
    if v["render.normalization"] == "fixed":
        lo, hi = v.get("render.lo"), v.get("render.hi")
        if lo is None or hi is None:
            raise ConfigError("fixed normalization needs render.lo and render.hi", key="render.normalization")
        if not hi > lo:
            raise ConfigError("render.hi must exceed render.lo", key="render.hi")
    if v["run.workers"] < 1:
        raise ConfigError("must be >= 1", key="run.workers")


def _format(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(c: ScenarioConfig) -> str:
    return "".join(f"{key} = {_format(c.values[key])}\n" for key in sorted(c.values))


_FIG_COMMON = "params.sigma = 0.3\nparams.beta = 0.03\n"

# Time and S spacings are dyadic so every preset grid contains (0, 0) exactly.
PRESETS: dict[str, str] = {
    "fig1a": _FIG_COMMON + """\
solution = rogon1
params.alpha = 2
params.k = 0
grid.s_min = -6
grid.s_max = 6
grid.n_s = 128
grid.t_min = -3
grid.t_max = 3
grid.n_t = 97
""",
    "fig1c": _FIG_COMMON + """\
solution = rogon1
params.alpha = 2
params.k = -1.5
grid.s_min = -6
grid.s_max = 6
grid.n_s = 128
grid.t_min = -3
grid.t_max = 3
grid.n_t = 97
""",
    "fig2a": _FIG_COMMON + """\
solution = rogon2
params.alpha = 0.8
params.k = 0
grid.s_min = -8
grid.s_max = 8
grid.n_s = 128
grid.t_min = -12
grid.t_max = 12
grid.n_t = 97
""",
    "fig2c": _FIG_COMMON + """\
solution = rogon2
params.alpha = 0.8
params.k = -1.5
grid.s_min = -16
grid.s_max = 16
grid.n_s = 256
grid.t_min = -12
grid.t_max = 12
grid.n_t = 97
""",
    "sim-fig1": _FIG_COMMON + """\
solution = simulate
params.alpha = 2
params.k = 0
sim.initial = rogon1
sim.dt = 0.001
grid.s_min = -60
grid.s_max = 60
grid.n_s = 4096
grid.t_min = -3
grid.t_max = 3
grid.n_t = 25
""",
    "mi-peak": _FIG_COMMON + """\
solution = mi
params.alpha = 2
params.k = 0
mi.l = 3.141592653589793
mi.n_s = 64
mi.eps = 1e-6
mi.m_pert = 1
mi.t_end = 20
mi.dt = 0.001
""",
    "mi-stable": _FIG_COMMON + """\
solution = mi
params.alpha = 2
params.k = 0
mi.l = 3.141592653589793
mi.n_s = 64
mi.eps = 1e-6
mi.m_pert = 2
mi.t_end = 40
mi.dt = 0.001
""",
    "bs-atm": """\
solution = bs
bs.r = 0.05
bs.sigma = 0.2
bs.strike = 100
bs.maturity = 1
""",
}
