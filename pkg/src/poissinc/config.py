"""Experiment configuration files.

A config is INI-style text with ``key = value`` lines::

    [experiment]
    kind = improper
    seed = 20240501

    [params]
    f = sinc
    tol = 1e-10

``[experiment]`` holds ``kind``, ``seed`` (required, unsigned 64-bit),
``replicates`` and ``workers``; ``[params]`` holds the kind-specific knobs
listed in :data:`KINDS`. Unknown keys are rejected so that typos do not
silently fall back to defaults.
"""

from __future__ import annotations

import ast
import configparser
import hashlib
from dataclasses import dataclass, field

from ._parse import SpecSyntaxError
from .distributions import parse_distribution, parse_marker
from .levy import parse_levy
from .series import parse_function

__all__ = ["ConfigError", "ExperimentConfig", "KINDS", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


def _floats(text):
    return tuple(float(x) for x in str(text).replace(";", ",").split(",") if x.strip())


_EXP = "exponential(rate=1)"

# kind -> (default replicates, {knob: default})
KINDS = {
    "series": (10000, {"f": "indicator(lo=0, hi=1)", "increments": _EXP, "n": 0}),
    "abel": (100, {"increments": _EXP, "n": 100000, "adversarial_s1": 1e-9,
                   "trace_stride": 1000}),
    "permute": (1, {"f": "cis_over_x", "increments": _EXP, "n": 100000,
                    "permutations": 200, "band": 5.0}),
    "blocks": (10000, {"f": "sinc", "increments": _EXP, "blocks": 200, "period": "pi",
                       "tolerance": 0.1}),
    "norm-growth": (10000, {"increments": _EXP, "p": "2, 4", "jmin": 7, "jmax": 14,
                            "resamples": 2000}),
    "chf": (10000, {"f": "indicator(lo=0, hi=1)", "increments": _EXP,
                    "t_grid": "0.5, 1, 2", "n": 0, "z_threshold": 4.0,
                    "control_shift": 10.0}),
    "lepage": (10000, {"model": "poisson_unit", "marker": "exponential_unit",
                       "f": "indicator(lo=0, hi=1)", "n": 0, "t_grid": "0.5, 1, 2",
                       "z_threshold": 4.0}),
    "kfun": (0, {"model": "poisson_unit", "marker": "pareto_tail(r=2, x0=1, unnormalized=true)",
                 "f": "sinc", "cutoff": 1.0, "s_grid": "1e2, 1e3, 1e4, 1e5, 1e6"}),
    "three-series": (0, {"model": "poisson_unit",
                         "marker": "pareto_tail(r=2, x0=1, unnormalized=true)",
                         "f": "sinc", "cutoff": 1.0}),
    "improper": (0, {"f": "sinc", "rule": "half_periods", "period": "pi",
                     "acceleration": "euler", "tol": 1e-10, "max_windows": 200}),
}

REQUIRED = ("kind", "seed")

_PARSERS = {
    "f": parse_function, "increments": parse_distribution, "marker": parse_marker,
    "model": parse_levy,
}


def _number(key, text, kind):
    if isinstance(text, (int, float)):
        return text
    s = str(text).strip()
    if s.lower() == "pi":
        import math
        return math.pi
    try:
        return kind(float(s)) if kind is int and "e" in s.lower() else kind(s)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {s!r}") from None


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    replicates: int
    params: dict
    workers: int = 1
    defaulted: list = field(default_factory=list)

    def canonical(self):
        """Text form with sorted keys; ``workers`` is left out since it never
        changes results."""
        lines = ["[experiment]", f"kind = {self.kind}", f"seed = {self.seed}",
                 f"replicates = {self.replicates}", "", "[params]"]
        lines += [f"{k} = {self.params[k]}" for k in sorted(self.params)]
        return "\n".join(lines) + "\n"

    @property
    def digest(self):
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()[:16]

    def get(self, key):
        return self.params[key]

    def number(self, key, kind=float):
        return _number(key, self.params[key], kind)

    def grid(self, key):
        return _floats(self.params[key])

    def spec(self, key):
        return _PARSERS[key](str(self.params[key]))


def _raw(line):
    # configparser reports the offending line as its repr
    line = line.strip()
    if line[:1] in ("'", '"'):
        line = ast.literal_eval(line)
    return line.strip()


def parse_config(text, seed=None, workers=None):
    """Build an :class:`ExperimentConfig` from config text.

    ``seed`` and ``workers`` override the file values.
    """
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(f"line {e.lineno}: expected a [section] header before {e.line.strip()!r}") from None
    except configparser.ParsingError as e:
        raise ConfigError("; ".join(f"line {n}: expected 'key = value', got {_raw(l)!r}"
                                    for n, l in e.errors)) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as e:
        raise ConfigError(f"line {e.lineno}: {e.message if hasattr(e, 'message') else e}") from None
    for sec in cp.sections():
        if sec not in ("experiment", "params"):
            raise ConfigError(f"unknown section [{sec}]; expected [experiment] and [params]")
    exp = dict(cp["experiment"]) if cp.has_section("experiment") else {}
    missing = [k for k in REQUIRED if k not in exp and not (k == "seed" and seed is not None)]
    if missing:
        raise ConfigError("missing required fields in [experiment]: " + ", ".join(missing)
                          + " (valid kinds: " + ", ".join(KINDS) + ")")
    kind = exp["kind"].strip()
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}; valid kinds: " + ", ".join(KINDS))
    extra = set(exp) - {"kind", "seed", "replicates", "workers"}
    if extra:
        raise ConfigError("unknown keys in [experiment]: " + ", ".join(sorted(extra)))
    if seed is None:
        seed = _number("seed", exp["seed"], int)
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    default_reps, knobs = KINDS[kind]
    defaulted = []
    if "replicates" in exp:
        reps = _number("replicates", exp["replicates"], int)
    else:
        reps = default_reps
        defaulted.append("replicates")
    if reps < 0:
        raise ConfigError("replicates must be nonnegative")
    if workers is None:
        workers = _number("workers", exp.get("workers", 1), int)
    given = dict(cp["params"]) if cp.has_section("params") else {}
    unknown = set(given) - set(knobs)
    if unknown:
        raise ConfigError(f"unknown keys for kind {kind!r}: " + ", ".join(sorted(unknown))
                          + "; accepted: " + ", ".join(knobs))
    params = {}
    for k, default in knobs.items():
        if k in given:
            params[k] = given[k].strip()
        else:
            params[k] = default
            defaulted.append(k)
    cfg = ExperimentConfig(kind, seed, reps, params, max(1, int(workers)), defaulted)
    for k in params:
        if k in _PARSERS:
            try:
                cfg.spec(k)
            except (SpecSyntaxError, ValueError, KeyError, TypeError) as e:
                raise ConfigError(f"{k} = {params[k]!r}: {e}") from None
    return cfg


def load_config(path, seed=None, workers=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), seed=seed, workers=workers)


def describe_kinds():
    return {k: dict(v[1], replicates=v[0]) for k, v in KINDS.items()}
