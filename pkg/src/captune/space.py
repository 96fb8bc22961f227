"""Discrete hardware configuration grids: normalization, distance, locality.

A configuration space is the full cross product of a handful of hardware
parameters (frequencies, core counts, binary toggles).  Every point carries a
mean-normalized coordinate vector in [-0.5, 0.5]^d, and neighborhoods are
Euclidean balls in that normalized space.  The locality operator
(`candidate_set`) restricts exploration to unexplored points within a given
radius of the most recent safe configuration.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ParamSpec",
    "Configuration",
    "ConfigSpace",
    "build_grid",
    "normalize",
    "distance",
    "candidate_set",
    "candidate_ids",
]


@dataclass(frozen=True)
class ParamSpec:
    """One tunable parameter with a finite, strictly increasing set of levels."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("parameter name must be nonempty")
        if len(self.values) == 0:
            raise ValueError(f"parameter {self.name!r} has no levels")
        vals = tuple(float(v) for v in self.values)
        if any(not math.isfinite(v) for v in vals):
            raise ValueError(f"parameter {self.name!r} has non-finite levels")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"levels of {self.name!r} must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, steps: int) -> "ParamSpec":
        """Uniformly spaced levels from lo to hi inclusive."""
        if steps < 1:
            raise ValueError("steps must be >= 1")
        if steps == 1:
            return cls(name, (float(lo),))
        return cls(name, tuple(np.linspace(lo, hi, steps)))

    @property
    def center(self) -> float:
        return (self.values[0] + self.values[-1]) / 2.0

    @property
    def width(self) -> float:
        return self.values[-1] - self.values[0]

    def normalize_value(self, v: float) -> float:
        """Mean-normalize one level into [-0.5, 0.5]; single-level params map to 0."""
        if v not in self.values:
            raise ValueError(f"{v!r} is not a level of {self.name!r}")
        if len(self.values) == 1:
            return 0.0
        return (v - self.center) / self.width


@dataclass(frozen=True)
class Configuration:
    """A single grid point: raw levels, normalized coordinates, grid id."""

    id: int
    raw: tuple[float, ...]
    norm: tuple[float, ...]
    space_tag: int

    def __repr__(self) -> str:  # keep reprs short in traces
        return f"Configuration(id={self.id}, raw={self.raw})"


class ConfigSpace:
    """Cross product of parameter levels with precomputed normalized coordinates.

    Grid ids enumerate the cross product in lexicographic order of the
    parameter list (last parameter varies fastest).  Immutable after
    construction; all methods are pure.
    """

    def __init__(self, params: Sequence[ParamSpec]):
        if not params:
            raise ValueError("a configuration space needs at least one parameter")
        self.params: tuple[ParamSpec, ...] = tuple(params)
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")
        raw = np.array(
            list(itertools.product(*(p.values for p in self.params))), dtype=float
        )
        self._raw = raw
        centers = np.array([p.center for p in self.params])
        widths = np.array([max(p.width, 0.0) for p in self.params])
        safe_widths = np.where(widths > 0, widths, 1.0)
        norm = (raw - centers) / safe_widths
        norm[:, widths == 0] = 0.0
        self._norm = norm
        self._centers = centers
        self._widths = widths
        self._index = {tuple(row): i for i, row in enumerate(raw.tolist())}
        self._tag = zlib.crc32(repr([(p.name, p.values) for p in self.params]).encode())
        self._configs: list[Configuration | None] = [None] * len(raw)

    # -- basic introspection ------------------------------------------------

    def __len__(self) -> int:
        return self._raw.shape[0]

    @property
    def dimension(self) -> int:
        return self._raw.shape[1]

    @property
    def tag(self) -> int:
        return self._tag

    @property
    def raw_grid(self) -> np.ndarray:
        """(n, d) array of raw levels; treat as read-only."""
        return self._raw

    @property
    def norm_grid(self) -> np.ndarray:
        """(n, d) array of normalized coordinates; treat as read-only."""
        return self._norm

    def diameter(self) -> float:
        """Largest pairwise normalized distance over the grid."""
        # Each multi-level axis spans exactly 1.0 in normalized units.
        active = sum(1 for p in self.params if len(p.values) > 1)
        return math.sqrt(active)

    # -- point construction --------------------------------------------------

    def config(self, cid: int) -> Configuration:
        if not 0 <= cid < len(self):
            raise IndexError(f"grid id {cid} out of range for {len(self)} points")
        cached = self._configs[cid]
        if cached is None:
            cached = Configuration(
                id=cid,
                raw=tuple(self._raw[cid].tolist()),
                norm=tuple(self._norm[cid].tolist()),
                space_tag=self._tag,
            )
            self._configs[cid] = cached
        return cached

    def config_from_raw(self, raw: Sequence[float]) -> Configuration:
        key = tuple(float(v) for v in raw)
        cid = self._index.get(key)
        if cid is None:
            raise ValueError(f"{key!r} is not a grid point")
        return self.config(cid)

    def configs(self) -> list[Configuration]:
        return [self.config(i) for i in range(len(self))]

    def normalize(self, raw: Sequence[float]) -> np.ndarray:
        """Normalized coordinates of a grid point (validates membership)."""
        return np.asarray(self.config_from_raw(raw).norm)

    def decode_norm(self, norm: Sequence[float]) -> tuple[float, ...]:
        """Nearest-level decode of a normalized vector back to raw levels."""
        vec = np.asarray(norm, dtype=float)
        if vec.shape != (self.dimension,):
            raise ValueError("normalized vector has wrong dimension")
        out = []
        for j, p in enumerate(self.params):
            levels = np.array(p.values)
            norms = np.array([p.normalize_value(v) for v in p.values])
            out.append(float(levels[np.argmin(np.abs(norms - vec[j]))]))
        return tuple(out)

    def contains(self, config: Configuration) -> bool:
        return config.space_tag == self._tag and 0 <= config.id < len(self)


def build_grid(specs: Sequence[ParamSpec]) -> ConfigSpace:
    """Construct the full cross-product grid from an ordered parameter list."""
    return ConfigSpace(specs)


def normalize(space: ConfigSpace, raw: Sequence[float]) -> np.ndarray:
    """Mean-normalize a raw grid point into [-0.5, 0.5]^d."""
    return space.normalize(raw)


def distance(a: Configuration, b: Configuration) -> float:
    """Euclidean distance between normalized coordinate vectors."""
    if a.space_tag != b.space_tag:
        raise ValueError("configurations come from different spaces")
    return math.dist(a.norm, b.norm)


def _sampled_id_set(sampled: Iterable[Configuration | int]) -> set[int]:
    ids: set[int] = set()
    for item in sampled:
        ids.add(item.id if isinstance(item, Configuration) else int(item))
    return ids


def candidate_ids(
    space: ConfigSpace,
    sampled: Iterable[Configuration | int],
    x_s: Configuration,
    gamma: float,
) -> np.ndarray:
    """Grid ids of unexplored points within `gamma` of `x_s`, ascending.

    Vectorized core of the locality operator; `candidate_set` wraps it with
    Configuration objects.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if not space.contains(x_s):
        raise ValueError("x_s does not belong to this space")
    center = np.asarray(x_s.norm)
    if math.isinf(gamma):
        mask = np.ones(len(space), dtype=bool)
    else:
        d2 = np.sum((space.norm_grid - center) ** 2, axis=1)
        mask = d2 <= gamma * gamma
    excluded = _sampled_id_set(sampled)
    if excluded:
        mask[np.fromiter(excluded, dtype=int)] = False
    return np.nonzero(mask)[0]


def candidate_set(
    space: ConfigSpace,
    sampled: Iterable[Configuration | int],
    x_s: Configuration,
    gamma: float,
) -> list[Configuration]:
    """Locality-preserving candidate set, enumerated in grid-id order.

    Returns exactly the grid points not yet sampled whose normalized distance
    to the reference safe configuration is at most gamma.
    """
    return [space.config(int(i)) for i in candidate_ids(space, sampled, x_s, gamma)]
