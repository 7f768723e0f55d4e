"""Breadth-first sphere/ball enumeration, indexing and growth estimation.

The BFS keys deduplication on canonical normal-form byte strings.  Because
normal forms are prefix-closed, every sphere is reached by extending the
previous frontier by single generators, and only words of the new length
can be new, so deduplication is per level.  Enumeration order is
deterministic: length first, then shortlex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .automaton import build_automaton
from .errors import CapExceeded, InsufficientData, UnsupportedBackend
from .groups import GroupBackend, Word

__all__ = [
    "DEFAULT_CAP",
    "BallIndex",
    "GrowthEstimate",
    "sphere_sizes",
    "sphere_sizes_exact",
    "build_ball_index",
    "estimate_growth",
]

DEFAULT_CAP = 5_000_000


@dataclass(frozen=True)
class BallIndex:
    """Dense indexing of the ball B_R, sorted by (length, shortlex).

    ``sphere_offsets[k] : sphere_offsets[k+1]`` slices sphere k out of
    ``words``; ``lookup`` maps normal-form bytes back to dense indices.
    """

    radius: int
    words: tuple[Word, ...]
    sphere_offsets: tuple[int, ...]
    lookup: dict[bytes, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.words)

    def sphere_sizes(self) -> list[int]:
        offs = self.sphere_offsets
        return [offs[k + 1] - offs[k] for k in range(self.radius + 1)]

    def sphere(self, k: int) -> tuple[Word, ...]:
        return self.words[self.sphere_offsets[k]: self.sphere_offsets[k + 1]]

    def index_of(self, w: Word) -> int:
        return self.lookup[w.ids]


def _bfs_levels(backend: GroupBackend, n_max: int, cap: int):
    """Yield (k, sorted byte-string frontier) for k = 0..n_max."""
    total = 1
    frontier: list[bytes] = [b""]
    yield 0, frontier
    n_letters = len(backend.alphabet)
    extend = backend.extend
    for k in range(1, n_max + 1):
        fresh: set[bytes] = set()
        for w in frontier:
            for g in range(n_letters):
                v = extend(w, g)
                if len(v) == k:
                    fresh.add(v)
        total += len(fresh)
        if total > cap:
            raise CapExceeded(
                f"ball through radius {k} needs {total} elements, cap is {cap}"
            )
        frontier = sorted(fresh)
        yield k, frontier


def sphere_sizes(backend: GroupBackend, n_max: int, cap: int = DEFAULT_CAP) -> list[int]:
    """Exact sphere cardinalities N_0..N_{n_max} by deduplicated BFS."""
    return [len(level) for _, level in _bfs_levels(backend, n_max, cap)]


def sphere_sizes_exact(backend: GroupBackend, n_max: int) -> list[int]:
    """Sphere cardinalities from the normal-form automaton (no cap).

    Integer path counting; the scalable route for radial-element
    construction at radii far beyond what enumeration could touch.
    Available for free and cyclicprod backends only.
    """
    if backend.kind not in ("free", "cyclicprod"):
        raise UnsupportedBackend("exact sphere counting needs a normal-form automaton")
    return build_automaton(backend).count_spheres(n_max)


def build_ball_index(backend: GroupBackend, radius: int, cap: int = DEFAULT_CAP) -> BallIndex:
    words: list[Word] = []
    offsets = [0]
    lookup: dict[bytes, int] = {}
    alphabet = backend.alphabet
    for _, level in _bfs_levels(backend, radius, cap):
        for ids in level:
            lookup[ids] = len(words)
            words.append(Word(ids, alphabet))
        offsets.append(len(words))
    return BallIndex(
        radius=radius,
        words=tuple(words),
        sphere_offsets=tuple(offsets),
        lookup=lookup,
    )


@dataclass(frozen=True)
class GrowthEstimate:
    """Exponential growth rate fitted from sphere sizes.

    q_hat = exp(slope) of the least-squares line through (k, ln N_k) over
    the upper half window; e_hat is the critical exponent ln(q_hat).
    """

    q_hat: float
    e_hat: float
    window: tuple[int, int]
    max_residual: float
    degenerate: bool


def estimate_growth(sizes: list[int]) -> GrowthEstimate:
    if len(sizes) < 6:
        raise InsufficientData(f"need at least 6 sphere sizes, got {len(sizes)}")
    n_max = len(sizes) - 1
    degenerate = any(s <= 0 for s in sizes)
    k_min = math.ceil(n_max / 2)
    ks = [k for k in range(k_min, n_max + 1) if sizes[k] > 0]
    if len(ks) < 2:
        return GrowthEstimate(
            q_hat=1.0, e_hat=0.0, window=(k_min, n_max), max_residual=0.0, degenerate=True
        )
    x = np.array(ks, dtype=float)
    y = np.log([float(sizes[k]) for k in ks])
    xm = x.mean()
    ym = y.mean()
    denom = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum()) / denom
    intercept = ym - slope * xm
    residuals = y - (slope * x + intercept)
    q_hat = math.exp(slope)
    degenerate = degenerate or q_hat <= 1.0 + 1e-6
    return GrowthEstimate(
        q_hat=q_hat,
        e_hat=math.log(q_hat),
        window=(k_min, n_max),
        max_residual=float(np.max(np.abs(residuals))),
        degenerate=degenerate,
    )
