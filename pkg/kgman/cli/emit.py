#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import csv
import os
import os.path as osp
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np

from kgman import logging as kglog
from kgman.logging import logger
from kgman.utils import atomic_write

_FMT = "%.17g"
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
_WIDTH, _HEIGHT = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 72, 24, 36, 52

_CHECKS = {
    "le": kglog.check_le,
    "lt": kglog.check_lt,
    "ge": kglog.check_ge,
    "gt": kglog.check_gt,
    "eq": kglog.check_eq,
}


@attr.s(auto_attribs=True, frozen=True)
class Series(object):
    r"""One polyline of a plot

    Args:
        label (str): Legend entry, also the ``series`` column of the CSV
        x (np.ndarray): Abscissae
        y (np.ndarray): Ordinates
    """
    label: str
    x: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=np.float64))
    y: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=np.float64))

    def __attrs_post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError(f"Series '{self.label}' needs equal-length vectors")


@attr.s(auto_attribs=True, frozen=True)
class CheckRecord(object):
    name: str
    value: float
    bound: float
    relation: str
    passed: bool


def _num(x) -> str:
    return _FMT % float(x)


def _axis_map(lo: float, hi: float, log: bool, start: float, span: float):
    if log:
        lo, hi = np.log10(lo), np.log10(hi)
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5

    def to_px(v):
        v = np.log10(v) if log else v
        return start + span * (v - lo) / (hi - lo)

    return to_px, lo, hi


def _ticks(lo: float, hi: float, log: bool) -> List[float]:
    if log:
        first, last = int(np.ceil(lo - 1e-9)), int(np.floor(hi + 1e-9))
        step = max(1, (last - first) // 6 + 1)
        return [10.0 ** k for k in range(first, last + 1, step)]
    return list(np.linspace(lo, hi, 5))


def render_svg(
    series: Sequence[Series],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = False,
    logy: bool = False,
) -> str:
    r"""Self-contained SVG document with one polyline per series

    On a log axis nonpositive samples are dropped from the drawing (the CSV
    beside the plot still carries them).
    """
    kept = []
    for s in series:
        keep = np.isfinite(s.x) & np.isfinite(s.y)
        if logx:
            keep &= s.x > 0
        if logy:
            keep &= s.y > 0
        kept.append((s.label, s.x[keep], s.y[keep]))
    xs = np.concatenate([x for _, x, _ in kept] + [np.zeros(0)])
    ys = np.concatenate([y for _, _, y in kept] + [np.zeros(0)])
    if len(xs) == 0:
        xs = ys = np.ones(1)

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM
    x_px, x_lo, x_hi = _axis_map(xs.min(), xs.max(), logx, _LEFT, plot_w)
    y_px, y_lo, y_hi = _axis_map(ys.min(), ys.max(), logy, _TOP + plot_h, -plot_h)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_WIDTH // 2}" y="20" text-anchor="middle" '
        f'font-size="13">{title}</text>',
        f'<text x="{_LEFT + plot_w // 2}" y="{_HEIGHT - 10}" '
        f'text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{_TOP + plot_h // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_TOP + plot_h // 2})">{ylabel}</text>',
    ]
    for v in _ticks(x_lo, x_hi, logx):
        px = x_px(v)
        out.append(
            f'<line x1="{px:.2f}" y1="{_TOP + plot_h}" x2="{px:.2f}" '
            f'y2="{_TOP + plot_h + 4}" stroke="black"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{_TOP + plot_h + 16}" '
            f'text-anchor="middle">{v:.3g}</text>'
        )
    for v in _ticks(y_lo, y_hi, logy):
        py = y_px(v)
        out.append(
            f'<line x1="{_LEFT - 4}" y1="{py:.2f}" x2="{_LEFT}" y2="{py:.2f}" '
            'stroke="black"/>'
        )
        out.append(
            f'<text x="{_LEFT - 6}" y="{py + 4:.2f}" text-anchor="end">{v:.3g}</text>'
        )

    for k, (label, x, y) in enumerate(kept):
        color = _PALETTE[k % len(_PALETTE)]
        if len(x):
            points = " ".join(f"{x_px(u):.2f},{y_px(v):.2f}" for u, v in zip(x, y))
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
                f'points="{points}"/>'
            )
        ly = _TOP + 14 + 14 * k
        out.append(
            f'<line x1="{_WIDTH - _RIGHT - 120}" y1="{ly - 4}" '
            f'x2="{_WIDTH - _RIGHT - 104}" y2="{ly - 4}" stroke="{color}"/>'
        )
        out.append(f'<text x="{_WIDTH - _RIGHT - 100}" y="{ly}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


class Emitter(object):
    r"""Writes the artifacts of one experiment run into ``out_dir``

    Every file is written once through :py:func:`kgman.utils.atomic_write`.
    Checks are recorded as they run and :py:meth:`write_checks` dumps them
    to ``checks.csv``; a failing check raises
    :py:class:`kgman.logging.FailedCheckException` after it is recorded.
    """

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.checks: List[CheckRecord] = []
        self.written: List[str] = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return osp.join(self.out_dir, name)

    def _register(self, name: str):
        if name in self.written:
            raise ValueError(f"'{name}' was already written in this run")
        self.written.append(name)

    def file(self, fname: str) -> str:
        r"""Claims ``fname`` for a writer outside the emitter"""
        self._register(fname)
        return self.path(fname)

    def table(self, name: str, columns: Sequence[str], data) -> str:
        r"""Numeric table ``<name>.csv`` with a header row"""
        fname = f"{name}.csv"
        self._register(fname)
        data = np.atleast_2d(np.asarray(data, dtype=np.float64))
        if data.shape[1] != len(columns):
            raise ValueError(
                f"{fname}: {len(columns)} columns named, {data.shape[1]} given"
            )
        with atomic_write(self.path(fname), "w", newline="") as f:
            np.savetxt(
                f, data, fmt=_FMT, delimiter=",", header=",".join(columns), comments=""
            )
        return self.path(fname)

    def plot(
        self,
        name: str,
        series: Sequence[Series],
        title: str = "",
        xlabel: str = "x",
        ylabel: str = "y",
        logx: bool = False,
        logy: bool = False,
    ) -> Tuple[str, str]:
        r"""``<name>.svg`` and its sibling ``<name>.csv`` (series,x,y rows)"""
        csv_name, svg_name = f"{name}.csv", f"{name}.svg"
        self._register(csv_name)
        self._register(svg_name)
        with atomic_write(self.path(csv_name), "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["series", xlabel, ylabel])
            for s in series:
                for x, y in zip(s.x, s.y):
                    writer.writerow([s.label, _num(x), _num(y)])
        svg = render_svg(series, title, xlabel, ylabel, logx, logy)
        with atomic_write(self.path(svg_name), "w", encoding="utf-8") as f:
            f.write(svg)
        return self.path(svg_name), self.path(csv_name)

    def check(self, name: str, value, bound, relation: str = "le"):
        r"""Records and enforces ``value <relation> bound``

        Args:
            name (str): Check name, reported on failure
            value: Measured value
            bound: Bound or expected value
            relation (str): One of ``le``, ``lt``, ``ge``, ``gt``, ``eq``
        """
        if relation not in _CHECKS:
            raise ValueError(f"Unknown check relation '{relation}'")
        try:
            _CHECKS[relation](value, bound, name=name)
        except kglog.FailedCheckException:
            self.checks.append(CheckRecord(name, value, bound, relation, False))
            raise
        self.checks.append(CheckRecord(name, value, bound, relation, True))
        logger.info(f"Check '{name}' passed: {value!r} {relation} {bound!r}")

    def write_checks(self) -> str:
        r"""``checks.csv`` with columns check,relation,value,bound,passed"""
        with atomic_write(self.path("checks.csv"), "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["check", "relation", "value", "bound", "passed"])
            for c in self.checks:
                writer.writerow(
                    [c.name, c.relation, _num(c.value), _num(c.bound), int(c.passed)]
                )
        return self.path("checks.csv")
