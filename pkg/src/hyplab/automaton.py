"""Normal-form subshift automata for free and cyclic free-product backends.

A state encodes the progress of the current syllable; reading a letter is
deterministic, so finite paths from a start state are exactly the normal
forms and infinite paths realize the Gromov boundary.  The automaton
serves two consumers: exact sphere counting (integer path counting, no
cap) and the Parry measure construction in the boundary module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedBackend
from .groups import GroupBackend

__all__ = ["NormalFormAutomaton", "build_automaton", "PerronData"]


@dataclass(frozen=True)
class NormalFormAutomaton:
    """Letter-deterministic automaton whose paths are the normal forms."""

    state_letters: tuple[int, ...]            # letter emitted on entering a state
    successors: tuple[tuple[int, ...], ...]   # outgoing states, ascending
    start_states: tuple[int, ...]             # states usable as a first letter
    state_names: tuple[str, ...]

    @property
    def n_states(self) -> int:
        return len(self.state_letters)

    def step(self, state: int, letter: int) -> int | None:
        for t in self.successors[state]:
            if self.state_letters[t] == letter:
                return t
        return None

    def start(self, letter: int) -> int | None:
        for s in self.start_states:
            if self.state_letters[s] == letter:
                return s
        return None

    def path(self, ids: bytes) -> list[int] | None:
        """State sequence of a word, or None if it is not a normal form."""
        states: list[int] = []
        cur: int | None = None
        for c in ids:
            cur = self.start(c) if cur is None else self.step(cur, c)
            if cur is None:
                return None
            states.append(cur)
        return states

    def count_spheres(self, n_max: int) -> list[int]:
        """Exact cardinalities of the spheres of radius 0..n_max.

        Pure integer dynamic programming over path counts; immune to the
        enumeration cap, which makes it the scalable route for the norm
        experiments at large radii.
        """
        counts = [1]
        ways = [0] * self.n_states
        for s in self.start_states:
            ways[s] = 1
        for _ in range(n_max):
            counts.append(sum(ways))
            nxt = [0] * self.n_states
            for s, w in enumerate(ways):
                if w:
                    for t in self.successors[s]:
                        nxt[t] += w
            ways = nxt
        return counts[: n_max + 1]

    def transition_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_states, self.n_states))
        for s, succ in enumerate(self.successors):
            for t in succ:
                a[s, t] = 1.0
        return a


@dataclass(frozen=True)
class PerronData:
    """Dominant eigendata of the transition matrix."""

    eigenvalue: float
    right: np.ndarray
    left: np.ndarray


def perron(matrix: np.ndarray, tol: float = 1e-15, max_iter: int = 100_000) -> PerronData:
    """Perron eigenvalue and positive left/right eigenvectors.

    Power iteration on A + I (the shift kills periodicity, e.g. the
    bipartite letter alternation of Z/2 * Z/3).  The matrix must be
    irreducible, which holds for every non-elementary backend we build.
    """
    n = matrix.shape[0]
    shifted = matrix + np.eye(n)

    def dominant(m: np.ndarray) -> np.ndarray:
        v = np.ones(n)
        for _ in range(max_iter):
            w = m @ v
            w /= w.max()
            if np.max(np.abs(w - v)) <= tol:
                v = w
                break
            v = w
        return v / v.sum()

    right = dominant(shifted)
    left = dominant(shifted.T)
    lam = float(left @ matrix @ right) / float(left @ right)
    return PerronData(eigenvalue=lam, right=right, left=left)


def build_automaton(backend: GroupBackend) -> NormalFormAutomaton:
    if backend.kind == "free":
        return _free_automaton(backend)
    if backend.kind == "cyclicprod":
        return _cyclicprod_automaton(backend)
    raise UnsupportedBackend(
        "normal-form automata are only built for free and cyclicprod backends"
    )


def _free_automaton(backend: GroupBackend) -> NormalFormAutomaton:
    # one state per letter; the next letter must not cancel
    letters = list(range(len(backend.alphabet)))
    inv = backend.alphabet.involution
    successors = tuple(
        tuple(t for t in letters if t != inv[s]) for s in letters
    )
    return NormalFormAutomaton(
        state_letters=tuple(letters),
        successors=successors,
        start_states=tuple(letters),
        state_names=tuple(backend.alphabet.letters),
    )


def _cyclicprod_automaton(backend: GroupBackend) -> NormalFormAutomaton:
    """States are syllable positions (factor, signed run length).

    For a factor of order m the canonical exponents are 1..floor(m/2)
    positively and 1..floor((m-1)/2) negatively (the halfway syllable of
    an even-order factor is spelled positively).  Continuing a run stays
    inside the factor; switching factors enters a fresh +-1 or -1 state.
    """
    orders = backend.orders
    assert orders is not None
    state_letters: list[int] = []
    state_names: list[str] = []
    owner: list[int] = []
    letter_pos = 0
    spans: list[tuple[int, int]] = []  # state index ranges per factor
    for f, m in enumerate(orders):
        pos_letter = letter_pos
        neg_letter = letter_pos if m == 2 else letter_pos + 1
        letter_pos += 1 if m == 2 else 2
        max_pos = m // 2
        max_neg = (m - 1) // 2
        begin = len(state_letters)
        for j in range(1, max_pos + 1):
            state_letters.append(pos_letter)
            state_names.append(f"{backend.alphabet.letters[pos_letter]}^{j}")
            owner.append(f)
        for j in range(1, max_neg + 1):
            state_letters.append(neg_letter)
            state_names.append(f"{backend.alphabet.letters[neg_letter]}^{j}")
            owner.append(f)
        spans.append((begin, len(state_letters)))
    entry_states: list[list[int]] = []
    for f, m in enumerate(orders):
        begin, _ = spans[f]
        entries = [begin]  # +1 state
        if m > 2:
            entries.append(begin + m // 2)  # -1 state
        entry_states.append(entries)
    successors: list[tuple[int, ...]] = []
    for s in range(len(state_letters)):
        f = owner[s]
        begin, _ = spans[f]
        m = orders[f]
        max_pos = m // 2
        offset = s - begin
        succ: list[int] = []
        if offset < max_pos:          # positive run at exponent offset+1
            if offset + 1 < max_pos:
                succ.append(s + 1)
        else:                          # negative run
            neg_j = offset - max_pos + 1
            if neg_j < (m - 1) // 2:
                succ.append(s + 1)
        for g in range(len(orders)):
            if g != f:
                succ.extend(entry_states[g])
        successors.append(tuple(sorted(succ)))
    starts = sorted(s for entries in entry_states for s in entries)
    return NormalFormAutomaton(
        state_letters=tuple(state_letters),
        successors=tuple(successors),
        start_states=tuple(starts),
        state_names=tuple(state_names),
    )
