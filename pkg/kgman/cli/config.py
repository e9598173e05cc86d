#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

r"""Flat ``key=value`` experiment configs

A config file holds one pair per line; ``#`` starts a comment. Keys are
namespaced: ``model.*`` and ``scheme.*`` map onto :py:class:`ModelParams` and
:py:class:`SchemeConfig`, ``trunc.*`` onto :py:class:`TruncationConfig`
overrides, ``output.dir`` and ``seed`` are run settings and ``exp.*`` keys
are handed to the experiment as strings.
"""

from typing import Callable, Dict, Iterable, List, Optional, Tuple

import attr

from kgman.core.params import ModelParams
from kgman.errors import ConfigError
from kgman.evolve.scheme import SchemeConfig
from kgman.manifolds.truncation import TruncationConfig

_MODEL_KEYS = {"m": float, "p": int, "N": int, "manifold": str}
_SCHEME_KEYS = {"order": int, "dt": float, "drift_tolerance": float}
_TRUNC_KEYS = {
    "epsilon": float,
    "r": float,
    "T_horizon": float,
    "fp_tol": float,
    "shoot_tol": float,
    "dt": float,
    "max_iter": int,
    "center_radius": float,
}
_NAMESPACES = ("model", "scheme", "trunc", "output", "exp")


def _to_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


_CONVERTERS: Dict[type, Callable[[str], object]] = {
    float: float,
    int: _to_int,
    str: str,
}


@attr.s(auto_attribs=True, frozen=True)
class ExperimentConfig(object):
    r"""Everything one experiment run needs

    Args:
        experiment (Optional[str]): Experiment name, if the file names one
        model (ModelParams): The model
        scheme (SchemeConfig): Splitting scheme settings
        trunc (Dict[str, float]): ``trunc.*`` overrides; the truncation
            itself is built per experiment by :py:meth:`truncation`
        output_dir (Optional[str]): ``output.dir``
        seed (int): Seed of randomized sweeps
        options (Dict[str, str]): Raw ``exp.*`` values
    """
    experiment: Optional[str] = None
    model: ModelParams = attr.ib(factory=ModelParams)
    scheme: SchemeConfig = attr.ib(factory=SchemeConfig)
    trunc: Dict[str, float] = attr.ib(factory=dict)
    output_dir: Optional[str] = None
    seed: int = 0
    options: Dict[str, str] = attr.ib(factory=dict)

    def truncation(self, default_epsilon: float = 1e-2) -> TruncationConfig:
        r"""Builds the truncation from ε (``trunc.epsilon`` or the default)

        Raises:
            ConfigError: If the derived scales violate their invariants
        """
        overrides = dict(self.trunc)
        epsilon = overrides.pop("epsilon", default_epsilon)
        try:
            return TruncationConfig.build(self.model, epsilon, **overrides)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid trunc.* settings: {e}") from e

    def option(self, name: str, default, kind: Callable = None):
        r"""Value of ``exp.<name>`` converted like ``default``

        Raises:
            ConfigError: If the value does not convert
        """
        if name not in self.options:
            return default
        kind = kind or type(default)
        text = self.options[name]
        try:
            if kind is bool:
                if text.lower() not in ("0", "1", "true", "false"):
                    raise ValueError(f"expected a boolean, got {text!r}")
                return text.lower() in ("1", "true")
            return _CONVERTERS.get(kind, kind)(text)
        except ValueError as e:
            raise ConfigError(f"exp.{name}: {e}") from e

    def float_list(self, name: str, default: Iterable[float]) -> List[float]:
        return self._list(name, default, float)

    def int_list(self, name: str, default: Iterable[int]) -> List[int]:
        return self._list(name, default, _to_int)

    def _list(self, name, default, convert):
        if name not in self.options:
            return list(default)
        try:
            values = [convert(x) for x in self.options[name].split(",") if x.strip()]
        except ValueError as e:
            raise ConfigError(f"exp.{name}: {e}") from e
        if not values:
            raise ConfigError(f"exp.{name} is empty")
        return values


def _split_line(line: str, lineno: int) -> Optional[Tuple[str, str]]:
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}", lineno)
    key, value = (part.strip() for part in text.split("=", 1))
    if not key or not value:
        raise ConfigError(f"empty key or value in {text!r}", lineno)
    return key, value


def _convert(table: Dict[str, type], namespace: str, name: str, value, lineno):
    if name not in table:
        raise ConfigError(f"unknown key '{namespace}.{name}'", lineno)
    try:
        return _CONVERTERS[table[name]](value)
    except ValueError as e:
        raise ConfigError(f"{namespace}.{name}: {e}", lineno) from e


def parse_config(text: str) -> ExperimentConfig:
    r"""Parses the contents of a config file

    Every value is type-converted and the owning attrs types are built, so
    their validators run at parse time.

    Raises:
        ConfigError: On syntax errors, unknown namespaces or keys, repeated
            keys and values the owning types reject
    """
    model: Dict[str, object] = {}
    scheme: Dict[str, object] = {}
    trunc: Dict[str, object] = {}
    options: Dict[str, str] = {}
    settings: Dict[str, object] = {}
    seen: Dict[str, int] = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        pair = _split_line(line, lineno)
        if pair is None:
            continue
        key, value = pair
        if key in seen:
            raise ConfigError(f"'{key}' already set on line {seen[key]}", lineno)
        seen[key] = lineno

        if key == "seed":
            try:
                settings["seed"] = _to_int(value)
            except ValueError as e:
                raise ConfigError(f"seed: {e}", lineno) from e
            continue
        if key == "experiment":
            settings["experiment"] = value
            continue
        namespace, _, name = key.partition(".")
        if namespace not in _NAMESPACES or not name:
            raise ConfigError(f"unknown namespace in key '{key}'", lineno)
        if namespace == "model":
            model[name] = _convert(_MODEL_KEYS, namespace, name, value, lineno)
        elif namespace == "scheme":
            scheme[name] = _convert(_SCHEME_KEYS, namespace, name, value, lineno)
        elif namespace == "trunc":
            trunc[name] = _convert(_TRUNC_KEYS, namespace, name, value, lineno)
        elif namespace == "output":
            if name != "dir":
                raise ConfigError(f"unknown key '{key}'", lineno)
            settings["output_dir"] = value
        else:
            options[name] = value

    try:
        params = ModelParams(**model)
    except ValueError as e:
        raise ConfigError(f"invalid model.* settings: {e}") from e
    try:
        scheme_cfg = SchemeConfig(**scheme)
    except ValueError as e:
        raise ConfigError(f"invalid scheme.* settings: {e}") from e

    cfg = ExperimentConfig(
        model=params, scheme=scheme_cfg, trunc=trunc, options=options, **settings
    )
    if "epsilon" in trunc:
        cfg.truncation()
    return cfg


def load_config(path: str) -> ExperimentConfig:
    r"""Reads and parses a UTF-8 config file"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config '{path}': {e}") from e
    return parse_config(text)
