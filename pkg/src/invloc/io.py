"""Text formats: instance files, bare point files, seeded parameters and trace CSV."""

from __future__ import annotations

import re
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import CostVector, Instance, NormTag, Point, Site
from .errors import InvalidArgumentError, ParseError

_SPLIT = re.compile(r"[,\s]+")

# Knuth's MMIX multiplier/increment; the top 53 bits of the state give a uniform double.
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


def _fields(line: str) -> list[str]:
    return [f for f in _SPLIT.split(line.strip()) if f]


def _lines(text: str | TextIO) -> Iterable[tuple[int, str]]:
    if not isinstance(text, str):
        text = text.read()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric field {token!r}", lineno) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite field {token!r}", lineno)
    return value


def parse_instance(text: str | TextIO) -> Instance:
    """Parse ``a b w c1+ c2+ c1- c2-`` lines, with an optional ``norm=<tag>`` header."""
    norm = NormTag.SQUARED_EUCLIDEAN
    sites: list[Site] = []
    costs: list[CostVector] = []
    for lineno, line in _lines(text):
        if line.lower().startswith("norm"):
            key, _, value = line.partition("=")
            if key.strip().lower() != "norm" or not value.strip():
                raise ParseError(f"malformed header {line!r}", lineno)
            if sites:
                raise ParseError("norm header must precede the site lines", lineno)
            try:
                norm = NormTag.parse(value)
            except InvalidArgumentError as exc:
                raise ParseError(str(exc), lineno) from None
            continue
        fields = _fields(line)
        if len(fields) != 7:
            raise ParseError(f"expected 7 fields, found {len(fields)}", lineno)
        a, b, w, *c = (_number(f, lineno) for f in fields)
        if w < 0:
            raise ParseError(f"negative weight {w}", lineno)
        if min(c) < 0:
            raise ParseError("negative cost", lineno)
        sites.append(Site(Point(a, b), w))
        costs.append(CostVector(*c))
    if not sites:
        raise ParseError("no sites found (at least one site is required)")
    return Instance(tuple(sites), tuple(costs), norm)


def format_instance(instance: Instance, digits: int = 6) -> str:
    """Inverse of :func:`parse_instance` (values written with ``digits`` decimals)."""
    out = [f"norm={instance.norm.value}"]
    for site, cv in zip(instance.sites, instance.costs):
        vals = (site.position.x, site.position.y, site.weight, *cv.as_tuple())
        out.append(" ".join(f"{v:.{digits}f}" for v in vals))
    return "\n".join(out) + "\n"


def load_xy_points(text: str | TextIO) -> list[Point]:
    """Read a bare two-column coordinate file."""
    points = []
    for lineno, line in _lines(text):
        fields = _fields(line)
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, found {len(fields)}", lineno)
        points.append(Point(_number(fields[0], lineno), _number(fields[1], lineno)))
    return points


class Lcg64:
    """``state <- a*state + c mod 2**64``; :meth:`uniform` uses the top 53 bits."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & _MASK64
        return self.state

    def uniform(self, lo: float, hi: float) -> float:
        u = (self.next_u64() >> 11) / float(1 << 53)
        return lo + (hi - lo) * u


def attach_random_params(points: Sequence[Point], seed: int, lo: float = 1.0, hi: float = 10.0,
                         norm: NormTag = NormTag.SQUARED_EUCLIDEAN) -> Instance:
    """Draw a weight and four unit costs per point from ``[lo, hi]`` (weight first, then c1+ c2+ c1- c2-)."""
    if not points:
        raise InvalidArgumentError("attach_random_params needs at least one point")
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise InvalidArgumentError(f"invalid parameter range [{lo}, {hi}]")
    if lo < 0:
        raise InvalidArgumentError("weights and costs must be nonnegative")
    gen = Lcg64(seed)
    sites = []
    costs = []
    for p in points:
        draws = [min(gen.uniform(lo, hi), hi) for _ in range(5)]
        sites.append(Site(p, draws[0]))
        costs.append(CostVector(*draws[1:]))
    return Instance(tuple(sites), tuple(costs), norm)


TRACE_HEADER = "k,x,y,f_k,f_target,gap,step_cost"


def fixed6(v: float) -> str:
    """6-decimal fixed point without a stray ``-0.000000``."""
    if not np.isfinite(v):
        return str(float(v))
    return f"{round(float(v), 6) + 0.0:.6f}"


def emit_trace_csv(report, sink: TextIO) -> None:
    sink.write(TRACE_HEADER + "\n")
    for rec in report.iterations:
        vals = (rec.median.x, rec.median.y, rec.median_value, rec.target_value, rec.gap, rec.step_cost)
        sink.write(f"{rec.k}," + ",".join(fixed6(v) for v in vals) + "\n")
    sink.write(f"accumulated_cost={fixed6(report.accumulated_cost)}\n")
    sink.write(f"net_cost={fixed6(report.net_cost)}\n")
    sink.write(f"stop={report.stop_reason.value}\n")
    sink.write(f"elapsed_s={fixed6(report.elapsed_seconds)}\n")
