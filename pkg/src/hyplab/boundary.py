"""Boundary measures, tail sets and the spherical pairing.

The boundary of a free or cyclic free-product group is realized as the
space of infinite normal forms, i.e. infinite paths in the normal-form
automaton.  The measure is the Parry (maximal-entropy) Markov measure
built from the dominant eigendata of the transition matrix; its cylinder
measures decay like q^-|w|, which is the Ahlfors-type regularity the rest
of the computation needs.  For free backends (trees) the measure is
exactly conformal and tail sums are evaluated in exact rational
arithmetic; everything else is reached through Monte-Carlo sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .automaton import NormalFormAutomaton, build_automaton, perron
from .errors import (
    DepthTooSmall,
    ElementaryGroup,
    NotANormalFormRay,
    UnsupportedBackend,
)
from .groups import GroupBackend, Word, gromov_product
from .radial import RadialElement

__all__ = [
    "BoundaryModel",
    "RaySample",
    "MCEstimate",
    "build_boundary",
    "cylinder_measure",
    "sample_ray",
    "sample_rays",
    "canonical_geodesic",
    "gromov_product_boundary",
    "rn_derivative",
    "tail_measure",
    "spherical_pairing",
    "spherical_via_tail",
    "radial_pairing",
]

STABILIZATION_MARGIN = 8


@dataclass(frozen=True)
class RaySample:
    """Finite prefix of a boundary ray, tagged with its seed provenance."""

    prefix: Word
    seed: int
    index: int = 0


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo value with its standard error."""

    value: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class BoundaryModel:
    """Parry measure on the normal-form subshift of a backend."""

    backend: GroupBackend
    automaton: NormalFormAutomaton
    eigenvalue: float
    init: np.ndarray = field(repr=False)     # over automaton states, start-supported
    trans: np.ndarray = field(repr=False)    # state-to-state transition probabilities
    free_q: int | None = None                # exact growth rate for tree backends

    @property
    def q(self) -> float:
        return self.eigenvalue

    @property
    def is_tree(self) -> bool:
        return self.free_q is not None

    # -- sampling tables ----------------------------------------------------

    def _tables(self):
        aut = self.automaton
        max_succ = max(len(s) for s in aut.successors)
        succ_ids = np.zeros((aut.n_states, max_succ), dtype=np.int64)
        succ_cum = np.ones((aut.n_states, max_succ))
        for s, succ in enumerate(aut.successors):
            probs = np.array([self.trans[s, t] for t in succ])
            cum = np.cumsum(probs / probs.sum())
            cum[-1] = 1.0  # guard the r ~ 1 edge against rounding drift
            succ_ids[s, : len(succ)] = succ
            succ_cum[s, : len(succ)] = cum
            succ_cum[s, len(succ):] = 1.0
        starts = np.array(aut.start_states, dtype=np.int64)
        start_cum = np.cumsum(self.init[starts])
        start_cum /= start_cum[-1]
        return succ_ids, succ_cum, starts, start_cum


def build_boundary(backend: GroupBackend) -> BoundaryModel:
    """Automaton plus Parry measure; rejects groups without a usable boundary."""
    if backend.kind == "free":
        assert backend.rank is not None
        if backend.rank < 2:
            raise ElementaryGroup("free:1 is two-ended; its boundary is two points")
        free_q: int | None = 2 * backend.rank - 1
    elif backend.kind == "cyclicprod":
        if backend.elementary:
            raise ElementaryGroup(
                f"cyclicprod{backend.orders} is finite or two-ended"
            )
        free_q = None
    else:
        raise UnsupportedBackend("boundary models exist for free and cyclicprod only")
    automaton = build_automaton(backend)
    matrix = automaton.transition_matrix()
    eig = perron(matrix)
    lam = eig.eigenvalue
    v = eig.right
    trans = np.zeros_like(matrix)
    for s in range(automaton.n_states):
        for t in automaton.successors[s]:
            trans[s, t] = v[t] / (lam * v[s])
    weights = eig.left * eig.right
    init = np.zeros(automaton.n_states)
    starts = list(automaton.start_states)
    init[starts] = weights[starts] / weights[starts].sum()
    return BoundaryModel(
        backend=backend,
        automaton=automaton,
        eigenvalue=lam,
        init=init,
        trans=trans,
        free_q=free_q,
    )


def _state_path(model: BoundaryModel, ids: bytes) -> list[int]:
    path = model.automaton.path(ids)
    if path is None:
        raise NotANormalFormRay(f"{model.backend._fmt(ids)} is not a normal form")
    return path


def cylinder_measure(model: BoundaryModel, w: Word | bytes) -> float:
    """Parry mass of the cylinder of rays extending the normal form w."""
    ids = w.ids if isinstance(w, Word) else bytes(w)
    if not ids:
        return 1.0
    path = _state_path(model, ids)
    p = float(model.init[path[0]])
    for s, t in zip(path, path[1:]):
        p *= float(model.trans[s, t])
    return p


def _exact_prefix_measure(model: BoundaryModel, length: int) -> Fraction:
    """Exact cylinder measure of a length-c geodesic prefix on a tree.

    On free:k the Parry measure is uniform: 1/(q+1) for the first letter
    and 1/q for each subsequent one, independent of the letters.
    """
    q = model.free_q
    assert q is not None
    if length <= 0:
        return Fraction(1)
    return Fraction(1, q + 1) * Fraction(1, q) ** (length - 1)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _sample_state_matrix(
    model: BoundaryModel, depth: int, count: int, seed: int
) -> np.ndarray:
    if depth < 1:
        raise DepthTooSmall("ray depth must be >= 1")
    succ_ids, succ_cum, starts, start_cum = model._tables()
    rng = np.random.default_rng(seed)
    states = np.empty((count, depth), dtype=np.int64)
    r = rng.random(count)
    states[:, 0] = starts[np.searchsorted(start_cum, r, side="right")]
    for step in range(1, depth):
        cur = states[:, step - 1]
        r = rng.random(count)
        slot = (r[:, None] >= succ_cum[cur]).sum(axis=1)
        states[:, step] = succ_ids[cur, slot]
    return states


def _letters_of(model: BoundaryModel, states: np.ndarray) -> np.ndarray:
    table = np.array(model.automaton.state_letters, dtype=np.int64)
    return table[states]


def sample_rays(model: BoundaryModel, depth: int, count: int, seed: int) -> list[RaySample]:
    letters = _letters_of(model, _sample_state_matrix(model, depth, count, seed))
    alphabet = model.backend.alphabet
    return [
        RaySample(prefix=Word(bytes(row.tolist()), alphabet), seed=seed, index=i)
        for i, row in enumerate(letters)
    ]


def sample_ray(model: BoundaryModel, depth: int, seed: int) -> RaySample:
    """One ray prefix drawn with probability exactly its cylinder measure."""
    return sample_rays(model, depth, 1, seed)[0]


def canonical_geodesic(model: BoundaryModel, n: int) -> Word:
    """Shortlex-least normal form of length n (greedy automaton walk)."""
    aut = model.automaton
    out = bytearray()
    state: int | None = None
    for _ in range(n):
        candidates = aut.start_states if state is None else aut.successors[state]
        nxt = min(candidates, key=lambda s: aut.state_letters[s])
        out.append(aut.state_letters[nxt])
        state = nxt
    return Word(bytes(out), model.backend.alphabet)


# ---------------------------------------------------------------------------
# Gromov products and Radon-Nikodym derivatives against rays
# ---------------------------------------------------------------------------


def _require_depth(gamma: Word, ray: RaySample) -> None:
    if len(ray.prefix) < len(gamma) + STABILIZATION_MARGIN:
        raise DepthTooSmall(
            f"ray depth {len(ray.prefix)} < |gamma| + {STABILIZATION_MARGIN}"
        )


def gromov_product_boundary(model: BoundaryModel, gamma: Word, ray: RaySample) -> Fraction:
    """(gamma, xi) evaluated against the full sampled prefix.

    On tree backends the product stabilizes once the depth exceeds
    (gamma, xi) <= |gamma|, so with the required margin this is exact.
    """
    _require_depth(gamma, ray)
    return gromov_product(model.backend, gamma, ray.prefix)


def rn_derivative(model: BoundaryModel, gamma: Word, ray: RaySample) -> float:
    """d(gamma_* mu)/d mu at the sampled ray.

    Tree backends: exactly q^(2(gamma,xi) - |gamma|), the conformality of
    the uniform measure.  Otherwise: the cylinder-measure ratio
    mu(gamma^-1 C_w) / mu(C_w) at the deepest available cylinder.
    """
    _require_depth(gamma, ray)
    backend = model.backend
    w = ray.prefix
    if model.is_tree:
        c = gromov_product(backend, gamma, w)
        assert c.denominator == 1
        return float(model.free_q) ** (2 * int(c) - len(gamma))
    moved = backend.multiply_ids(backend.invert_ids(gamma.ids), w.ids)
    return cylinder_measure(model, moved) / cylinder_measure(model, w)


# ---------------------------------------------------------------------------
# tail sets S(t) and the spherical pairing
# ---------------------------------------------------------------------------


def _ceil_level(t) -> int:
    return int(math.ceil(float(t)))


def tail_measure(
    model: BoundaryModel,
    gamma: Word,
    t,
    mode: str = "exact",
    samples: int = 10_000,
    seed: int = 0,
):
    """mu(S(t)) with S(t) = {xi : (gamma, xi) >= t}.

    Exact mode (tree backends only): the Gromov product against a ray is
    the common prefix length, so S(t) is the cylinder of gamma's prefix of
    length ceil(t).  MC mode returns an MCEstimate.
    """
    n = len(gamma)
    level = _ceil_level(t)
    if mode == "exact":
        if not model.is_tree:
            raise UnsupportedBackend("exact tail sums are implemented for trees only")
        if level <= 0:
            return 1.0
        if level > n:
            return 0.0
        return float(_exact_prefix_measure(model, level))
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    depth = n + STABILIZATION_MARGIN
    products = _mc_gromov_products(model, gamma, depth, samples, seed)
    hits = float(np.count_nonzero(products >= level)) / samples
    stderr = math.sqrt(max(hits * (1.0 - hits), 0.0) / samples)
    return MCEstimate(value=hits, stderr=stderr, samples=samples, seed=seed)


def _mc_gromov_products(
    model: BoundaryModel, gamma: Word, depth: int, samples: int, seed: int
) -> np.ndarray:
    """Doubled-then-halved integer Gromov products of gamma against rays."""
    states = _sample_state_matrix(model, depth, samples, seed)
    letters = _letters_of(model, states)
    n = len(gamma)
    if model.is_tree and n <= depth:
        g = np.frombuffer(gamma.ids, dtype=np.uint8).astype(np.int64)
        if n == 0:
            return np.zeros(samples)
        agree = np.cumprod(letters[:, :n] == g[None, :], axis=1)
        return agree.sum(axis=1).astype(float)
    backend = model.backend
    g_inv = backend.invert_ids(gamma.ids)
    out = np.empty(samples)
    for i in range(samples):
        w = bytes(letters[i].tolist())
        d = len(backend.multiply_ids(g_inv, w))
        out[i] = 0.5 * (n + depth - d)
    return out


def _exact_pairing_expectation(model: BoundaryModel, n: int) -> Fraction:
    """E[q^(gamma, xi)] as an exact rational, by level masses."""
    q = model.free_q
    assert q is not None
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for c in range(n + 1):
        mass_c = Fraction(1) if c == 0 else _exact_prefix_measure(model, c)
        mass_next = _exact_prefix_measure(model, c + 1) if c < n else Fraction(0)
        total += Fraction(q) ** c * (mass_c - mass_next)
    return total


def spherical_pairing(
    model: BoundaryModel,
    n: int,
    mode: str = "exact",
    samples: int = 10_000,
    seed: int = 0,
):
    """Phi(n) = E[(d(gamma_* mu)/d mu)^(1/2)] for a geodesic word of length n.

    gamma is fixed as the shortlex-least geodesic of length n; by letter
    symmetry the value depends only on n.  Exact mode (trees) evaluates
    q^(-n/2) E[q^((gamma, xi))] with an exact rational core; MC mode
    averages per-sample derivatives and reports the standard error.
    """
    if mode == "exact":
        if not model.is_tree:
            raise UnsupportedBackend("exact pairing is implemented for trees only")
        expectation = _exact_pairing_expectation(model, n)
        return float(expectation) * float(model.free_q) ** (-n / 2.0)
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    gamma = canonical_geodesic(model, n)
    return _pairing_mc(model, gamma, samples, seed)


def _pairing_mc(model: BoundaryModel, gamma: Word, samples: int, seed: int) -> MCEstimate:
    n = len(gamma)
    depth = n + STABILIZATION_MARGIN
    if model.is_tree:
        products = _mc_gromov_products(model, gamma, depth, samples, seed)
        values = np.power(float(model.free_q), products - n / 2.0)
    else:
        states = _sample_state_matrix(model, depth, samples, seed)
        letters = _letters_of(model, states)
        backend = model.backend
        g_inv = backend.invert_ids(gamma.ids)
        values = np.empty(samples)
        for i in range(samples):
            w = bytes(letters[i].tolist())
            moved = backend.multiply_ids(g_inv, w)
            values[i] = math.sqrt(
                cylinder_measure(model, moved) / cylinder_measure(model, w)
            )
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MCEstimate(value=mean, stderr=stderr, samples=samples, seed=seed)


def pairing_mc_for_word(
    model: BoundaryModel, gamma: Word, samples: int = 10_000, seed: int = 0
) -> MCEstimate:
    """MC pairing for an explicit geodesic word (radiality checks)."""
    return _pairing_mc(model, gamma, samples, seed)


def spherical_via_tail(model: BoundaryModel, n: int) -> float:
    """Layer-cake route: q^(-n/2) (1 + sum_t mu(S(t)) (q^t - q^(t-1))).

    Must agree with exact spherical_pairing; the two share only the exact
    prefix-measure primitive, the summation formulas are independent.
    """
    if not model.is_tree:
        raise UnsupportedBackend("the layer-cake route is implemented for trees only")
    q = model.free_q
    assert q is not None
    total = Fraction(1)
    for t in range(1, n + 1):
        total += _exact_prefix_measure(model, t) * (Fraction(q) ** t - Fraction(q) ** (t - 1))
    return float(total) * float(q) ** (-n / 2.0)


def radial_pairing(
    model: BoundaryModel,
    a: RadialElement,
    sizes,
    mode: str = "exact",
    samples: int = 10_000,
    seed: int = 0,
) -> float:
    """<pi(a) 1, 1> = sum_k a_k N_k Phi(k), the boundary lower bound for
    ||lambda(a)||."""
    total = 0.0
    for k, c in enumerate(a.coeffs):
        if c == 0.0:
            continue
        phi = spherical_pairing(model, k, mode=mode, samples=samples, seed=seed + k)
        value = phi.value if isinstance(phi, MCEstimate) else phi
        total += c * float(sizes[k]) * value
    return total
