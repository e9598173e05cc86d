#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import os.path as osp

import pytest

import kgman
from kgman.cli.config import ExperimentConfig, load_config, parse_config
from kgman.errors import ConfigError

_TEXT = """
# mode-0 portrait on a coarser spectrum
experiment = phase-portrait
model.m = 0.3
model.p = 2
model.N = 4     # four circle frequencies
scheme.order = 4
scheme.dt = 5e-4
trunc.epsilon = 0.05
output.dir = runs/portrait
seed = 7
exp.etas = 0.1, 0.2
exp.binary = false
"""


def test_config_eq():
    cfg1 = ExperimentConfig(model=kgman.ModelParams(), scheme=kgman.SchemeConfig())
    cfg2 = ExperimentConfig(model=kgman.ModelParams(), scheme=kgman.SchemeConfig())

    assert cfg1 == cfg2
    assert parse_config(_TEXT) == parse_config(_TEXT)


def test_parse_config():
    cfg = parse_config(_TEXT)
    assert cfg.experiment == "phase-portrait"
    assert cfg.model == kgman.ModelParams(m=0.3, p=2, N=4)
    assert cfg.scheme == kgman.SchemeConfig(order=4, dt=5e-4)
    assert cfg.trunc == {"epsilon": 0.05}
    assert cfg.output_dir == "runs/portrait"
    assert cfg.seed == 7
    assert cfg.float_list("etas", []) == [0.1, 0.2]
    assert cfg.option("binary", True, bool) is False
    assert cfg.option("missing", 3.5) == 3.5


def test_empty_config_has_defaults():
    cfg = parse_config("\n# nothing here\n")
    assert cfg == ExperimentConfig()
    trunc = cfg.truncation()
    assert trunc.epsilon == 1e-2
    assert cfg.truncation(0.1).epsilon == 0.1


def test_truncation_overrides():
    cfg = parse_config("trunc.epsilon = 0.1\ntrunc.fp_tol = 1e-10\ntrunc.max_iter = 80")
    trunc = cfg.truncation()
    assert trunc.fp_tol == 1e-10
    assert trunc.max_iter == 80
    assert isinstance(trunc.max_iter, int)


@pytest.mark.parametrize(
    "text,line",
    [
        ("model.m = 0.5\nsolver.tol = 1", 2),
        ("model.m = 0.5\n\nmodel.mass = 1", 3),
        ("model.m = 0.5\nmodel.m = 0.4", 2),
        ("scheme.order = two", 1),
        ("model.N = 2.5", 1),
        ("just a line", 1),
        ("output.format = svg", 1),
        ("seed = x", 1),
        ("model.m =", 1),
    ],
)
def test_bad_lines(text, line):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_duplicate_key_names_first_line():
    with pytest.raises(ConfigError, match="already set on line 1"):
        parse_config("model.p = 1\nmodel.p = 2")


@pytest.mark.parametrize(
    "text",
    [
        "model.m = 2",
        "model.manifold = sphere",
        "scheme.order = 3",
        "scheme.dt = -1",
        "trunc.epsilon = 2",
        "trunc.epsilon = 0.1\ntrunc.r = 0.9",
    ],
)
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_truncation_errors_deferred_without_epsilon():
    cfg = parse_config("trunc.r = 0.9")
    with pytest.raises(ConfigError):
        cfg.truncation()


def test_options():
    cfg = parse_config("exp.modes = 1, 3,7\nexp.T = 12\nexp.flag = maybe\nexp.n = 2.5")
    assert cfg.int_list("modes", [1]) == [1, 3, 7]
    assert cfg.int_list("other", (2,)) == [2]
    assert cfg.option("T", 1.0) == 12.0
    with pytest.raises(ConfigError):
        cfg.option("flag", True, bool)
    with pytest.raises(ConfigError):
        cfg.option("n", 1)
    with pytest.raises(ConfigError):
        cfg.float_list("flag", [])


def test_load_config(tmp_path):
    path = osp.join(str(tmp_path), "run.cfg")
    with open(path, "w", encoding="utf-8") as f:
        f.write(_TEXT)
    assert load_config(path) == parse_config(_TEXT)
    with pytest.raises(ConfigError):
        load_config(osp.join(str(tmp_path), "missing.cfg"))
    with open(path, "wb") as f:
        f.write(b"model.m = \xff\xfe")
    with pytest.raises(ConfigError):
        load_config(path)
