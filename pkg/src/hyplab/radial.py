"""Radial group-algebra elements a = sum_k a_k sigma_k and their norms.

sigma_k is the sum of all group elements of length k, so a radial element
is determined by its coefficient vector (a_0, ..., a_n).  Coefficients
must be nonnegative.  Sphere sizes are passed in explicitly; they are the
only group-dependent input any of these computations need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import BadSpec, MissingSizes

__all__ = [
    "RadialElement",
    "make_element",
    "parse_element_spec",
    "l2_norm",
    "weighted_norm",
    "theorem_rhs",
    "haagerup_upper_bounds",
]


@dataclass(frozen=True)
class RadialElement:
    """Nonnegative radial coefficient vector; degree = last index."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise BadSpec("a radial element needs at least the degree-0 coefficient")
        if any(c < 0 or not math.isfinite(c) for c in self.coeffs):
            raise BadSpec("radial coefficients must be finite and nonnegative")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def support_degree(self) -> int:
        """Largest k with a_k != 0 (0 for the zero element)."""
        for k in range(self.degree, -1, -1):
            if self.coeffs[k] != 0.0:
                return k
        return 0

    def is_single_sphere(self) -> bool:
        return sum(1 for c in self.coeffs if c != 0.0) == 1

    def scaled(self, factor: float) -> "RadialElement":
        return RadialElement(tuple(factor * c for c in self.coeffs))


def _require_sizes(sizes: Sequence[int], degree: int) -> None:
    if len(sizes) < degree + 1:
        raise MissingSizes(
            f"need sphere sizes through k={degree}, got {len(sizes)} entries"
        )


def make_element(
    kind: str,
    n: int | None = None,
    sizes: Sequence[int] | None = None,
    coeffs: Sequence[float] | None = None,
) -> RadialElement:
    """Build one of the standard test families.

    sphere(n):     a_n = 1, all other a_k = 0
    ball(n):       a_k = 1 for k <= n
    family_iii(n): a_k = (k+1)/sqrt(N_k), pinning ||a_k sigma_k||_2 = k+1
    family_iv(n):  a_k = (k+1)^-2/sqrt(N_k), pinning ||a_k sigma_k||_2 = (k+1)^-2
    explicit:      the given coefficient list
    """
    if kind == "explicit":
        if coeffs is None:
            raise BadSpec("explicit elements need a coefficient list")
        return RadialElement(tuple(float(c) for c in coeffs))
    if n is None or n < 0:
        raise BadSpec(f"element family {kind!r} needs a degree n >= 0")
    if kind == "sphere":
        return RadialElement(tuple(0.0 for _ in range(n)) + (1.0,))
    if kind == "ball":
        return RadialElement(tuple(1.0 for _ in range(n + 1)))
    if kind in ("family_iii", "family_iv"):
        if sizes is None:
            raise MissingSizes(f"element family {kind!r} needs sphere sizes")
        _require_sizes(sizes, n)
        if any(sizes[k] <= 0 for k in range(n + 1)):
            raise MissingSizes("sphere sizes must be positive through the degree")
        if kind == "family_iii":
            weights = [float(k + 1) for k in range(n + 1)]
        else:
            weights = [float(k + 1) ** -2 for k in range(n + 1)]
        return RadialElement(
            tuple(w / math.sqrt(float(sizes[k])) for k, w in enumerate(weights))
        )
    raise BadSpec(f"unknown element kind {kind!r}")


def parse_element_spec(text: str, sizes: Sequence[int] | None = None) -> RadialElement:
    """CLI element grammar: sphere:N | ball:N | fam3:N | fam4:N | coeffs:a0,a1,..."""
    head, sep, tail = text.partition(":")
    if not sep:
        raise BadSpec(f"bad element spec {text!r}")
    if head == "coeffs":
        try:
            values = [float(part) for part in tail.split(",")]
        except ValueError:
            raise BadSpec(f"bad coefficient list in {text!r}")
        if any(v < 0 for v in values):
            raise BadSpec("radial coefficients must be nonnegative")
        return make_element("explicit", coeffs=values)
    kinds = {"sphere": "sphere", "ball": "ball", "fam3": "family_iii", "fam4": "family_iv"}
    if head not in kinds:
        raise BadSpec(f"unknown element family {head!r} in {text!r}")
    try:
        n = int(tail)
    except ValueError:
        raise BadSpec(f"bad degree in element spec {text!r}")
    if n < 0:
        raise BadSpec(f"element degree must be >= 0 in {text!r}")
    return make_element(kinds[head], n=n, sizes=sizes)


def l2_norm(a: RadialElement, sizes: Sequence[int]) -> float:
    """sqrt(sum_k a_k^2 N_k)."""
    _require_sizes(sizes, a.degree)
    return math.sqrt(sum(c * c * float(sizes[k]) for k, c in enumerate(a.coeffs)))


def weighted_norm(a: RadialElement, s: float, sizes: Sequence[int]) -> float:
    """s-weighted ell^2 norm sqrt(sum_k (k+1)^(2s) a_k^2 N_k)."""
    if s < 0:
        raise BadSpec("the weight exponent s must be >= 0")
    _require_sizes(sizes, a.degree)
    return math.sqrt(
        sum(float(k + 1) ** (2 * s) * c * c * float(sizes[k]) for k, c in enumerate(a.coeffs))
    )


def theorem_rhs(a: RadialElement, sizes: Sequence[int]) -> float:
    """sum_k (k+1) a_k sqrt(N_k), the two-sided estimate's right-hand side."""
    _require_sizes(sizes, a.degree)
    return sum(
        float(k + 1) * c * math.sqrt(float(sizes[k])) for k, c in enumerate(a.coeffs)
    )


def haagerup_upper_bounds(
    a: RadialElement, sizes: Sequence[int], s: float
) -> tuple[float | None, float, float]:
    """The three classical upper bounds evaluated at support radius n.

    Returns ((n+1)*l2 when a is supported on a single sphere, else None,
    (n+1)^(3/2)*l2, weighted s-norm).
    """
    n = a.support_degree
    l2 = l2_norm(a, sizes)
    sphere_slot = (n + 1) * l2 if a.is_single_sphere() else None
    return sphere_slot, (n + 1) ** 1.5 * l2, weighted_norm(a, s, sizes)
