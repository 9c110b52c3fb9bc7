"""Scenario files: INI-like sections with strict key checking.

::

    [material]
    lambda = 1
    mu = 1
    mu_c = 12
    mu2 = 1e-3

    [grid]
    nx = 128
    ny = 128

    [bc]
    left, 0, 1, 0
    bottom, 0, 1, 0
    right, 0, 1, pi
    top, 0, 1, pi

    [drive]
    0, -2
    1, 2

Numbers may be written as arithmetic in ``pi`` (``pi/2``, ``3*pi/2``).
``[bc]`` lines are ``side, t0, t1, value``; ``[drive]`` lines are ``t, beta``.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field

from .field import BoundarySpec, BoundaryError, Grid2D, Segment
from .params import MaterialParams, ParameterError, ShearDrive, validate
from .solver import EvolveConfig


class ConfigError(ValueError):
    pass


KEYS = {
    "material": {"lambda", "mu", "mu_c", "mu2", "rho", "sigma_y"},
    "grid": {"nx", "ny", "lx", "ly"},
    "evolve": {"dt", "t_end", "stat_tol", "max_steps", "scheme", "mode",
               "snapshot_every", "record_every", "init", "cg_tol"},
    "output": {"dir", "formats"},
}
LINE_SECTIONS = ("bc", "drive")
REQUIRED_MATERIAL = ("lambda", "mu", "mu_c")
FORMATS = {"csv", "pgm"}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow,
        ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "inf": math.inf}


def parse_number(text: str) -> float:
    """Evaluate a numeric literal or +-*/ arithmetic in pi."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(text)
    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse number {text!r}") from None


@dataclass
class ScenarioConfig:
    sections: dict = field(default_factory=dict)   # name -> {key: raw str}
    lines: dict = field(default_factory=dict)      # name -> [(lineno, raw)]
    source: str = "<string>"

    def has(self, section: str) -> bool:
        return section in self.sections or section in self.lines

    def require(self, *names):
        for n in names:
            if not self.has(n):
                raise ConfigError(f"{self.source}: missing section [{n}]")

    def _get(self, section, key, default=None):
        sec = self.sections.get(section, {})
        if key not in sec:
            if default is None:
                raise ConfigError(f"{self.source}: missing key {key!r} in [{section}]")
            return default
        return sec[key]

    def number(self, section, key, default=None) -> float:
        raw = self._get(section, key, None if default is None else repr(default))
        try:
            return parse_number(raw)
        except ConfigError as exc:
            raise ConfigError(f"{self.source}: [{section}] {key}: {exc}") from None

    def integer(self, section, key, default=None) -> int:
        v = self.number(section, key, default)
        if v != int(v):
            raise ConfigError(f"{self.source}: [{section}] {key} must be an integer")
        return int(v)

    def text(self, section, key, default=None) -> str:
        return self._get(section, key, default).strip()

    # -- typed views --------------------------------------------------------

    def material(self) -> MaterialParams:
        self.require("material")
        sec = self.sections["material"]
        for k in REQUIRED_MATERIAL:
            if k not in sec:
                raise ConfigError(f"{self.source}: missing key {k!r} in [material]")
        try:
            return validate(MaterialParams(
                lam=self.number("material", "lambda"), mu=self.number("material", "mu"),
                mu_c=self.number("material", "mu_c"), mu2=self.number("material", "mu2", 1.0),
                rho=self.number("material", "rho", 0.0),
                sigma_y=self.number("material", "sigma_y", 0.0)))
        except ParameterError as exc:
            raise ConfigError(f"{self.source}: [material] {exc}") from None

    def grid(self) -> Grid2D:
        self.require("grid")
        try:
            return Grid2D(self.integer("grid", "nx"), self.integer("grid", "ny"),
                          self.number("grid", "lx", 1.0), self.number("grid", "ly", 1.0))
        except ValueError as exc:
            raise ConfigError(f"{self.source}: [grid] {exc}") from None

    def boundary(self) -> BoundarySpec:
        self.require("bc")
        segs = []
        for lineno, raw in self.lines.get("bc", []):
            parts = [x.strip() for x in raw.split(",")]
            if len(parts) != 4:
                raise ConfigError(f"{self.source}:{lineno}: bc line needs 'side, t0, t1, value'")
            try:
                segs.append(Segment(parts[0], parse_number(parts[1]), parse_number(parts[2]),
                                    parse_number(parts[3])))
            except ConfigError as exc:
                raise ConfigError(f"{self.source}:{lineno}: {exc}") from None
        try:
            bc = BoundarySpec(tuple(segs))
            bc.validate_cover()
        except BoundaryError as exc:
            raise ConfigError(f"{self.source}: [bc] {exc}") from None
        return bc

    def drive(self) -> ShearDrive:
        rows = self.lines.get("drive", [])
        if not rows:
            return ShearDrive.constant(0.0)
        samples = []
        for lineno, raw in rows:
            parts = [x.strip() for x in raw.split(",")]
            if len(parts) != 2:
                raise ConfigError(f"{self.source}:{lineno}: drive line needs 't, beta'")
            try:
                samples.append((parse_number(parts[0]), parse_number(parts[1])))
            except ConfigError as exc:
                raise ConfigError(f"{self.source}:{lineno}: {exc}") from None
        try:
            return ShearDrive(tuple(samples))
        except ParameterError as exc:
            raise ConfigError(f"{self.source}: [drive] {exc}") from None

    def evolve(self) -> EvolveConfig:
        s = "evolve"
        dt_raw = self.text(s, "dt", "auto")
        try:
            return EvolveConfig(
                dt=None if dt_raw == "auto" else parse_number(dt_raw),
                t_end=self.number(s, "t_end", math.inf),
                stat_tol=self.number(s, "stat_tol", 1e-8),
                max_steps=self.integer(s, "max_steps", 1_000_000),
                scheme=self.text(s, "scheme", "explicit"),
                mode=self.text(s, "mode", "case2_J"),
                record_every=self.integer(s, "record_every", 100),
                snapshot_every=self.integer(s, "snapshot_every", 0),
                cg_tol=self.number(s, "cg_tol", 1e-10))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{self.source}: [evolve] {exc}") from None

    def init_kind(self) -> str:
        raw = self.text("evolve", "init", "harmonic")
        if raw == "harmonic":
            return raw
        return repr(parse_number(raw))

    def output_dir(self, default="out") -> str:
        return self.text("output", "dir", default)

    def formats(self) -> set:
        raw = self.text("output", "formats", "csv")
        fmts = {x.strip() for x in raw.split(",") if x.strip()}
        bad = fmts - FORMATS
        if bad:
            raise ConfigError(f"{self.source}: [output] unknown formats {sorted(bad)}")
        return fmts


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """Parse and strictly validate a scenario document (no computation)."""
    cfg = ScenarioConfig(source=source)
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in KEYS and current not in LINE_SECTIONS:
                raise ConfigError(f"{source}:{lineno}: unknown section [{current}]")
            if cfg.has(current):
                raise ConfigError(f"{source}:{lineno}: duplicate section [{current}]")
            if current in LINE_SECTIONS:
                cfg.lines[current] = []
            else:
                cfg.sections[current] = {}
            continue
        if current is None:
            raise ConfigError(f"{source}:{lineno}: content before the first section")
        if current in LINE_SECTIONS:
            cfg.lines[current].append((lineno, line))
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in KEYS[current]:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in [{current}]")
        if key in cfg.sections[current]:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        cfg.sections[current][key] = value
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))
