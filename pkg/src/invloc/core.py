"""Domain types and the distance/objective/cost primitives shared by all solvers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateInstanceError, InvalidArgumentError


class NormTag(enum.Enum):
    SQUARED_EUCLIDEAN = "sq"
    EUCLIDEAN = "l2"
    RECTILINEAR = "l1"

    @classmethod
    def parse(cls, text: str) -> "NormTag":
        key = text.strip().lower()
        aliases = {
            "sq": cls.SQUARED_EUCLIDEAN,
            "squared": cls.SQUARED_EUCLIDEAN,
            "squared_euclidean": cls.SQUARED_EUCLIDEAN,
            "squaredeuclidean": cls.SQUARED_EUCLIDEAN,
            "l2": cls.EUCLIDEAN,
            "euclidean": cls.EUCLIDEAN,
            "l1": cls.RECTILINEAR,
            "rectilinear": cls.RECTILINEAR,
            "manhattan": cls.RECTILINEAR,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidArgumentError(f"unknown norm {text!r}") from None


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidArgumentError(f"non-finite point ({self.x}, {self.y})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @classmethod
    def from_array(cls, arr) -> "Point":
        return cls(float(arr[0]), float(arr[1]))


@dataclass(frozen=True)
class Site:
    position: Point
    weight: float

    def __post_init__(self):
        if not math.isfinite(self.weight) or self.weight < 0:
            raise InvalidArgumentError(f"site weight must be finite and >= 0, got {self.weight}")


@dataclass(frozen=True)
class CostVector:
    """Per-unit prices for moving one site: +x, +y, -x, -y."""

    inc_x: float
    inc_y: float
    dec_x: float
    dec_y: float

    def __post_init__(self):
        for name in ("inc_x", "inc_y", "dec_x", "dec_y"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidArgumentError(f"cost {name} must be finite and >= 0, got {v}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.inc_x, self.inc_y, self.dec_x, self.dec_y)


@dataclass(frozen=True)
class Instance:
    sites: tuple[Site, ...]
    costs: tuple[CostVector, ...]
    norm: NormTag = NormTag.SQUARED_EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "costs", tuple(self.costs))
        if len(self.sites) < 1:
            raise InvalidArgumentError("an instance needs at least one site")
        if len(self.sites) != len(self.costs):
            raise InvalidArgumentError(
                f"{len(self.sites)} sites but {len(self.costs)} cost vectors"
            )

    @classmethod
    def from_arrays(cls, coords, weights, costs, norm: NormTag = NormTag.SQUARED_EUCLIDEAN) -> "Instance":
        """Build from an (n, 2) coordinate array, n weights and an (n, 4) cost array."""
        coords = np.asarray(coords, dtype=float)
        weights = np.asarray(weights, dtype=float)
        costs = np.asarray(costs, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise InvalidArgumentError("coords must have shape (n, 2)")
        if weights.shape != (coords.shape[0],) or costs.shape != (coords.shape[0], 4):
            raise InvalidArgumentError("weights/costs do not match the number of sites")
        sites = tuple(Site(Point(a, b), float(w)) for (a, b), w in zip(coords, weights))
        cvs = tuple(CostVector(*map(float, row)) for row in costs)
        return cls(sites, cvs, norm)

    def __len__(self):
        return len(self.sites)

    @cached_property
    def coords(self) -> np.ndarray:
        arr = np.array([[s.position.x, s.position.y] for s in self.sites])
        arr.flags.writeable = False
        return arr

    @cached_property
    def weights(self) -> np.ndarray:
        arr = np.array([s.weight for s in self.sites])
        arr.flags.writeable = False
        return arr

    @cached_property
    def cost_matrix(self) -> np.ndarray:
        """(n, 4) array, columns inc_x, inc_y, dec_x, dec_y."""
        arr = np.array([c.as_tuple() for c in self.costs], dtype=float).reshape(-1, 4)
        arr.flags.writeable = False
        return arr

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def positions(self) -> list[Point]:
        return [s.position for s in self.sites]

    def with_coords(self, coords) -> "Instance":
        return Instance.from_arrays(coords, self.weights, self.cost_matrix, self.norm)

    def with_norm(self, norm: NormTag) -> "Instance":
        return Instance(self.sites, self.costs, norm)

    def require_weight(self) -> float:
        total = self.total_weight
        if total <= 0:
            raise DegenerateInstanceError("total weight is zero")
        return total


@dataclass(frozen=True, eq=False)
class Modification:
    """Nonnegative increases ``r`` and decreases ``s``, both shaped (n, 2)."""

    r: np.ndarray
    s: np.ndarray = field(default=None)

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(-1, 2)
        s = np.zeros_like(r) if self.s is None else np.array(self.s, dtype=float).reshape(-1, 2)
        if r.shape != s.shape:
            raise InvalidArgumentError("r and s must have the same length")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(s))):
            raise InvalidArgumentError("modification entries must be finite")
        if np.any(r < 0) or np.any(s < 0):
            raise InvalidArgumentError("modification entries must be >= 0")
        r.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    @classmethod
    def zeros(cls, n: int) -> "Modification":
        return cls(np.zeros((n, 2)), np.zeros((n, 2)))

    @classmethod
    def from_displacement(cls, delta) -> "Modification":
        """Split a net displacement into its positive and negative parts."""
        delta = np.asarray(delta, dtype=float).reshape(-1, 2)
        return cls(np.maximum(delta, 0.0), np.maximum(-delta, 0.0))

    def __len__(self):
        return self.r.shape[0]

    @property
    def displacement(self) -> np.ndarray:
        return self.r - self.s

    def swapped(self) -> "Modification":
        return Modification(self.s, self.r)

    def scaled(self, alpha: float) -> "Modification":
        return Modification(alpha * self.r, alpha * self.s)


def distance(norm: NormTag, p: Point, q: Point) -> float:
    dx = p.x - q.x
    dy = p.y - q.y
    if norm is NormTag.SQUARED_EUCLIDEAN:
        return dx * dx + dy * dy
    if norm is NormTag.EUCLIDEAN:
        return math.hypot(dx, dy)
    if norm is NormTag.RECTILINEAR:
        return abs(dx) + abs(dy)
    raise InvalidArgumentError(f"unsupported norm {norm!r}")


def distances(norm: NormTag, x, coords) -> np.ndarray:
    """Vectorised distance from one location ``x`` to every row of ``coords``."""
    diff = np.asarray(coords, dtype=float) - np.asarray(x, dtype=float)
    if norm is NormTag.SQUARED_EUCLIDEAN:
        return np.einsum("ij,ij->i", diff, diff)
    if norm is NormTag.EUCLIDEAN:
        return np.hypot(diff[:, 0], diff[:, 1])
    if norm is NormTag.RECTILINEAR:
        return np.abs(diff).sum(axis=1)
    raise InvalidArgumentError(f"unsupported norm {norm!r}")


def weighted_cost(norm: NormTag, x, coords, weights) -> float:
    return float(np.dot(weights, distances(norm, x, coords)))


def objective(instance: Instance, x) -> float:
    """Weighted sum of distances from ``x`` to the sites of ``instance``."""
    if isinstance(x, Point):
        x = x.as_array()
    return weighted_cost(instance.norm, x, instance.coords, instance.weights)


def apply(instance: Instance, m: Modification) -> Instance:
    if len(m) != len(instance):
        raise InvalidArgumentError(
            f"modification has {len(m)} entries, instance has {len(instance)} sites"
        )
    return instance.with_coords(instance.coords + m.r - m.s)


def modification_cost(costs: Sequence[CostVector] | np.ndarray, m: Modification) -> float:
    cm = _cost_matrix(costs)
    if cm.shape[0] != len(m):
        raise InvalidArgumentError(
            f"modification has {len(m)} entries, got {cm.shape[0]} cost vectors"
        )
    return float(np.sum(cm[:, :2] * m.r) + np.sum(cm[:, 2:] * m.s))


def displacement_cost(costs, delta) -> float:
    """Cost of a net displacement, moving each axis in whichever direction it points."""
    return modification_cost(costs, Modification.from_displacement(delta))


def _cost_matrix(costs) -> np.ndarray:
    if isinstance(costs, np.ndarray):
        return costs.reshape(-1, 4)
    return np.array([c.as_tuple() for c in costs], dtype=float).reshape(-1, 4)
