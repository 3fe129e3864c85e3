"""Experiment configuration and its flat ``key = value`` file format.

Grammar: one ``key = value`` per line, ``#`` starts a comment, list values
are comma separated, ``inf`` denotes the sup norm and ``none`` clears an
optional value. Unknown keys are rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

ESTIMATORS = ("LS", "TS", "LN", "TN", "TN_sup")
ALLOWED_NORMS = (1.0, 2.0, 4.0, 6.0, 8.0, 10.0, math.inf)


class ConfigError(ValueError):
    pass


def _default_eps():
    return [2**k / 1000 for k in range(7)]


@dataclass
class ExperimentConfig:
    phantom: str = "shepp_logan"
    epsilons: list[float] = field(default_factory=_default_eps)
    kappas: list[float] = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0])
    norms: list[float] = field(default_factory=lambda: list(ALLOWED_NORMS))
    estimators: list[str] = field(default_factory=lambda: list(ESTIMATORS))
    seeds: list[int] = field(default_factory=lambda: list(range(5)))
    grid: int = 256
    j_override: int | None = None
    timing: bool = True
    save_images: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("epsilons", "kappas", "norms", "estimators", "seeds"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a nonempty list")
        if any(not 0 < e < 1 for e in self.epsilons):
            raise ConfigError("every epsilon must lie in (0, 1)")
        if any(k < 0 for k in self.kappas):
            raise ConfigError("kappas must be nonnegative")
        if any(p not in ALLOWED_NORMS for p in self.norms):
            raise ConfigError(f"norms must be drawn from {ALLOWED_NORMS}")
        if any(e not in ESTIMATORS for e in self.estimators):
            raise ConfigError(f"estimators must be drawn from {ESTIMATORS}")
        if self.grid < 32:
            raise ConfigError("grid must be at least 32")
        if self.j_override is not None and not 1 <= self.j_override <= 8:
            raise ConfigError("j_override must lie in 1..8")


def _parse_bool(v: str) -> bool:
    low = v.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _parse_norm(v: str) -> float:
    return math.inf if v.lower() in ("inf", "infinity") else float(v)


def _split(v: str) -> list[str]:
    return [x.strip() for x in v.split(",") if x.strip()]


_PARSERS = {
    "phantom": str,
    "epsilons": lambda v: [float(x) for x in _split(v)],
    "kappas": lambda v: [float(x) for x in _split(v)],
    "norms": lambda v: [_parse_norm(x) for x in _split(v)],
    "estimators": _split,
    "seeds": lambda v: [int(x) for x in _split(v)],
    "grid": int,
    "j_override": lambda v: None if v.lower() == "none" else int(v),
    "timing": _parse_bool,
    "save_images": _parse_bool,
}


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg: ExperimentConfig) -> str:
    def fmt(v):
        if isinstance(v, list):
            return ", ".join(fmt(x) for x in v)
        if isinstance(v, float) and math.isinf(v):
            return "inf"
        if v is None:
            return "none"
        if isinstance(v, bool):
            return "true" if v else "false"
        return repr(v) if isinstance(v, float) else str(v)

    return "".join(f"{f.name} = {fmt(getattr(cfg, f.name))}\n" for f in fields(cfg))
