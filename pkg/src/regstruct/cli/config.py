"""Flat key-value run configuration with a typed schema.

The file format is one `section.key = value` pair per line, `#` comments,
blank lines ignored.  Every key must appear in the schema; unknown keys
and untypeable values raise ConfigError so that misconfigured numerical
runs fail before they start.
"""
from __future__ import annotations

from fractions import Fraction

from ..errors import ConfigError

__all__ = ["SCHEMA", "DEFAULTS", "parse_config", "parse_eps", "load_config"]


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _choice(*options):
    def conv(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {options}")
        return text

    return conv


def parse_eps(text: str) -> float:
    """A single scale, accepting plain floats and dyadic `2^-k` notation."""
    text = text.strip()
    if text.startswith(("2^", "2**")):
        exp = text.split("^")[-1].split("*")[-1]
        return 2.0 ** int(exp)
    return float(text)


SCHEMA = {
    "spec.equation": _choice("gpam", "phi4"),
    "spec.alpha": _fraction,
    "spec.r": _fraction,
    "grid.level": int,
    "noise.eps": parse_eps,
    "noise.seed": int,
    "noise.profile": _choice("bump", "cosine"),
    "solver.T": float,
    "solver.n_steps": int,
    "solver.cutoff": float,
    "solver.g": _choice("linear", "sin"),
}

DEFAULTS = {
    "spec.equation": "gpam",
    "spec.alpha": None,
    "spec.r": None,
    "grid.level": 6,
    "noise.eps": 2.0**-4,
    "noise.seed": 0,
    "noise.profile": "bump",
    "solver.T": 0.25,
    "solver.n_steps": 64,
    "solver.cutoff": 1e3,
    "solver.g": "sin",
}


def parse_config(text: str) -> dict:
    """Typed config dict from file text; unknown keys are errors."""
    out = dict(DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        conv = SCHEMA.get(key)
        if conv is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = conv(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(
                f"line {lineno}: bad value {value!r} for {key}: {exc}"
            ) from exc
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return dict(DEFAULTS)
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
