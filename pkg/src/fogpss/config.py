"""INI experiment files for first-order closed-loop runs.

A file has the sections ``[plant]``, ``[reference]``, ``[measurement]``,
``[controller]`` and ``[sim]``. Catalog functions are selected by name and
their parameters are given as dotted keys, for example::

    [plant]
    disturbance = sin-product
    disturbance.amplitude = 0.5

Unknown sections or keys are rejected, required keys must be present and
every number must be a decimal literal.
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .controllers import FogpssConfig
from .errors import AssumptionViolation
from .plants import (
    CATALOG,
    CatalogFunction,
    FirstOrderPlant,
    MeasurementModel,
    PlantBounds,
    constant_reference,
    cosine_reference,
    estimate_u_max,
)
from .simkit import LambdaTrackerConfig, SimConfig

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "bundled_config_path", "SEED_ENV"]

SEED_ENV = "FOGPSS_SEED"
_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


class ConfigError(ValueError):
    """Malformed experiment file; the message names the offending section and key."""


# section -> (required keys, optional keys); "fn.*" marks a catalog selector with dotted params
_SCHEMA: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "plant": (("a_p", "b_p", "a_lo", "a_hi", "b_lo", "b_hi", "d_bar", "disturbance"), ()),
    "reference": (("kind", "b1", "b2"), ("amplitude", "freq", "phase", "offset", "value")),
    "measurement": (("omega", "c1", "c2"), ("alpha",)),
    "controller": (("type",), ("delta", "beta_bar", "epsilon0", "alpha", "u_max", "x_abs_bound",
                               "lambda", "k0", "law", "negate_u")),
    "sim": (("h", "T", "x0"), ("seed", "scheme")),
}
_CATALOG_KEYS = {("plant", "disturbance"), ("measurement", "omega")}


@dataclass(frozen=True)
class ExperimentConfig:
    """A parsed experiment: the simulation configuration plus where it came from."""

    sim: SimConfig
    source: str
    u_max_estimated: bool = False

    @property
    def controller(self):
        return self.sim.controller


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, source: str):
        self.p = parser
        self.source = source

    def _where(self, section: str, key: str) -> str:
        return f"{self.source}: [{section}] {key}"

    def raw(self, section: str, key: str) -> str | None:
        return self.p.get(section, key, fallback=None)

    def number(self, section: str, key: str, default: float | None = None) -> float:
        text = self.raw(section, key)
        if text is None:
            if default is None:
                raise ConfigError(f"{self._where(section, key)}: missing required key")
            return default
        text = text.strip()
        if not _NUMBER.fullmatch(text):
            raise ConfigError(f"{self._where(section, key)}: {text!r} is not a decimal literal")
        return float(text)

    def integer(self, section: str, key: str, default: int) -> int:
        text = self.raw(section, key)
        if text is None:
            return default
        if not re.fullmatch(r"[+-]?\d+", text.strip()):
            raise ConfigError(f"{self._where(section, key)}: {text!r} is not an integer")
        return int(text)

    def boolean(self, section: str, key: str, default: bool) -> bool:
        if self.raw(section, key) is None:
            return default
        try:
            return self.p.getboolean(section, key)
        except ValueError as exc:
            raise ConfigError(f"{self._where(section, key)}: {exc}") from None

    def word(self, section: str, key: str, default: str | None = None) -> str:
        text = self.raw(section, key)
        if text is None:
            if default is None:
                raise ConfigError(f"{self._where(section, key)}: missing required key")
            return default
        return text.strip()

    def catalog(self, section: str, key: str) -> CatalogFunction:
        name = self.word(section, key)
        if name not in CATALOG:
            raise ConfigError(f"{self._where(section, key)}: unknown catalog function {name!r}")
        _, required, optional, _ = CATALOG[name]
        params = {}
        prefix = key + "."
        for k in self.p[section]:
            if k.startswith(prefix):
                pname = k[len(prefix):]
                if pname not in required + optional:
                    raise ConfigError(f"{self._where(section, k)}: {name!r} takes no parameter {pname!r}")
                params[pname] = self.number(section, k)
        for pname in required:
            if pname not in params:
                raise ConfigError(f"{self._where(section, prefix + pname)}: missing required key")
        return CatalogFunction(name, params)


def _check_keys(parser: configparser.ConfigParser, source: str) -> None:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
    for section, (required, optional) in _SCHEMA.items():
        if not parser.has_section(section):
            raise ConfigError(f"{source}: missing section [{section}]")
        allowed = set(required) | set(optional)
        for key in parser[section]:
            base = key.split(".", 1)[0]
            if "." in key and (section, base) in _CATALOG_KEYS:
                continue
            if key not in allowed:
                raise ConfigError(f"{source}: [{section}] {key}: unknown key")
        for key in required:
            if key not in parser[section]:
                raise ConfigError(f"{source}: [{section}] {key}: missing required key")


def parse_config(text: str, source: str = "<string>", seed_override: str | None = None) -> ExperimentConfig:
    """Parse and validate an experiment file held in ``text``.

    Gain and assumption checks run here, so an invalid experiment fails before
    any simulation starts. ``seed_override`` (normally taken from the
    ``FOGPSS_SEED`` environment variable) replaces ``[sim] seed``.
    """
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    _check_keys(parser, source)
    r = _Reader(parser, source)

    bounds = PlantBounds(*(r.number("plant", k) for k in ("a_lo", "a_hi", "b_lo", "b_hi", "d_bar")))
    plant = FirstOrderPlant(r.number("plant", "a_p"), r.number("plant", "b_p"), r.catalog("plant", "disturbance"), bounds)

    kind = r.word("reference", "kind")
    b1, b2 = r.number("reference", "b1"), r.number("reference", "b2")
    if kind == "cosine":
        reference = cosine_reference(
            r.number("reference", "amplitude"), r.number("reference", "freq"), b1, b2,
            r.number("reference", "phase", 0.0), r.number("reference", "offset", 0.0),
        )
    elif kind == "constant":
        reference = constant_reference(r.number("reference", "value"), b1, b2)
    else:
        raise ConfigError(f"{source}: [reference] kind: expected 'cosine' or 'constant', got {kind!r}")

    ctype = r.word("controller", "type")
    negate_u = r.boolean("controller", "negate_u", False)
    estimated = False
    if ctype == "fogpss":
        alpha = r.number("controller", "alpha")
        if r.raw("controller", "u_max") is not None:
            u_max = r.number("controller", "u_max")
        else:
            u_max = estimate_u_max(bounds, reference, r.number("controller", "x_abs_bound", b1))
            estimated = True
        controller = FogpssConfig(
            r.number("controller", "delta"), r.number("controller", "beta_bar"),
            r.number("controller", "epsilon0"), alpha, u_max,
        )
    elif ctype == "lambda":
        alpha = r.number("controller", "alpha")
        controller = LambdaTrackerConfig(
            r.number("controller", "lambda"), alpha, r.number("controller", "k0", 0.0),
            r.word("controller", "law", "default"),
        )
    elif ctype == "none":
        alpha = None
        controller = None
    else:
        raise ConfigError(f"{source}: [controller] type: expected 'fogpss', 'lambda' or 'none', got {ctype!r}")

    omega = r.catalog("measurement", "omega")
    c1, c2 = r.number("measurement", "c1"), r.number("measurement", "c2")
    m_alpha = r.number("measurement", "alpha", alpha if alpha is not None else 1.0)
    if isinstance(controller, FogpssConfig) and r.raw("measurement", "alpha") is not None and m_alpha != alpha:
        raise ConfigError(f"{source}: [measurement] alpha: must equal [controller] alpha for fogpss")
    if omega.sup > c1:
        raise AssumptionViolation("measurement bounds", f"{source}: omega amplitude {omega.sup:g} exceeds c1={c1:g}")
    measurement = MeasurementModel(omega, c1, c2, m_alpha)

    seed = r.integer("sim", "seed", 0)
    if seed_override is not None:
        if not re.fullmatch(r"[+-]?\d+", seed_override.strip()):
            raise ConfigError(f"{SEED_ENV}={seed_override!r} is not an integer")
        seed = int(seed_override)
    sim = SimConfig(
        h=r.number("sim", "h"), T=r.number("sim", "T"), plant=plant, reference=reference,
        measurement=measurement, controller=controller, x0=r.number("sim", "x0"), seed=seed,
        negate_u=negate_u, scheme=r.word("sim", "scheme", "implicit"),
    )
    return ExperimentConfig(sim, source, estimated)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, str(path), os.environ.get(SEED_ENV))


def bundled_config_path(name: str) -> Path:
    """Filesystem path of a configuration shipped with the package."""
    ref = resources.files("fogpss") / "configs" / name
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled config {name!r}")
    return Path(str(ref))
