"""Alphabets, normal forms, word arithmetic and Gromov products.

Every group is driven by a string rewriting system over a symmetric
alphabet.  Rules must strictly decrease shortlex order (declaration order
of the letters is the letter order), which guarantees termination; local
confluence is checked on all critical pairs at construction time, so by
Newman's lemma every word has a unique normal form.  Free groups use the
implicit cancellation rules ``g g^-1 -> eps`` with a fast reduction path
that agrees with the generic engine.

Words are stored as byte strings of letter indices.  All objects are
immutable after construction and all operations are pure functions, so
everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from string import ascii_lowercase
from typing import Iterable, Sequence

from .errors import (
    AsymmetricAlphabet,
    BadSpec,
    BallTooLarge,
    InvalidOrder,
    NonReducingRule,
    NotLocallyConfluent,
    ParseError,
    UnknownLetter,
)

__all__ = [
    "Alphabet",
    "Word",
    "GroupBackend",
    "HyperbolicityEstimate",
    "free_group",
    "compile_cyclicprod",
    "load_rws",
    "loads_rws",
    "normalize",
    "multiply",
    "invert",
    "gromov_product",
    "estimate_delta",
]

DELTA_BALL_GUARD = 4000


@dataclass(frozen=True)
class Alphabet:
    """Ordered symmetric alphabet.

    ``letters`` fixes the shortlex order; ``involution`` maps each letter
    index to the index of its formal inverse (a letter may be its own
    inverse, which is how order-2 generators are spelled).
    """

    letters: tuple[str, ...]
    involution: tuple[int, ...]

    def __post_init__(self) -> None:
        names = self.letters
        if len(set(names)) != len(names):
            raise AsymmetricAlphabet("letter names must be unique")
        for name in names:
            if not name or any(ch.isspace() for ch in name):
                raise AsymmetricAlphabet(f"bad letter name {name!r}")
        inv = self.involution
        if len(inv) != len(names) or sorted(inv) != list(range(len(names))):
            raise AsymmetricAlphabet("involution is not a bijection on the letters")
        for i, j in enumerate(inv):
            if inv[j] != i:
                raise AsymmetricAlphabet(
                    f"involution is not self-inverse at {names[i]!r}"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def index(self, name: str) -> int:
        try:
            return self.letters.index(name)
        except ValueError:
            raise UnknownLetter(f"letter {name!r} not in alphabet {self.letters}")

    def inverse_name(self, name: str) -> str:
        return self.letters[self.involution[self.index(name)]]


@dataclass(frozen=True)
class Word:
    """A group element in canonical (shortlex) normal form.

    Only backend operations construct these, so the irreducibility
    invariant holds by construction.  Equality compares the spelled-out
    letters, so words from equal alphabets compare as expected.
    """

    ids: bytes
    alphabet: Alphabet

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def length(self) -> int:
        return len(self.ids)

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(self.alphabet.letters[i] for i in self.ids)

    def __str__(self) -> str:
        return " ".join(self.letters) if self.ids else "eps"

    def __repr__(self) -> str:
        return f"Word({str(self)})"


Rule = tuple[bytes, bytes]


def _shortlex_less(a: bytes, b: bytes) -> bool:
    return (len(a), a) < (len(b), b)


@dataclass(frozen=True)
class GroupBackend:
    """Normalization and multiplication engine for one group presentation.

    ``kind`` is one of ``free``, ``cyclicprod`` or ``rws``; the kinds only
    differ in metadata and fast paths, the rewriting semantics are shared.
    ``rules`` always contains the full explicit rule set, including free
    cancellation.
    """

    kind: str
    alphabet: Alphabet
    rules: tuple[Rule, ...]
    rank: int | None = None                     # free backends
    orders: tuple[int, ...] | None = None       # cyclicprod backends
    elementary: bool | None = None              # None = unknown (general rws)

    def __post_init__(self) -> None:
        for lhs, rhs in self.rules:
            if not lhs:
                raise ParseError("empty rule left-hand side")
            if not _shortlex_less(rhs, lhs):
                raise NonReducingRule(
                    f"rule {self._fmt(lhs)} -> {self._fmt(rhs)} does not decrease shortlex order"
                )
        _check_local_confluence(self)

    # -- formatting helpers -------------------------------------------------

    def _fmt(self, ids: bytes) -> str:
        return " ".join(self.alphabet.letters[i] for i in ids) if ids else "eps"

    def word(self, ids: bytes) -> Word:
        return Word(ids, self.alphabet)

    @property
    def identity(self) -> Word:
        return Word(b"", self.alphabet)

    @property
    def generators(self) -> tuple[Word, ...]:
        return tuple(Word(bytes([i]), self.alphabet) for i in range(len(self.alphabet)))

    def parse_letters(self, raw: Iterable[str]) -> bytes:
        return bytes(self.alphabet.index(name) for name in raw)

    # -- reduction ----------------------------------------------------------

    def reduce(self, seq: bytes) -> bytes:
        """Rewrite ``seq`` to its unique normal form."""
        if self.kind == "free":
            return self._reduce_free(seq)
        return self._reduce_generic(seq)

    def _reduce_free(self, seq: bytes) -> bytes:
        inv = self.alphabet.involution
        out = bytearray()
        for c in seq:
            if out and inv[out[-1]] == c:
                out.pop()
            else:
                out.append(c)
        return bytes(out)

    def _reduce_generic(self, seq: bytes) -> bytes:
        # Leftmost rewriting with a reprocessing stack: a fresh redex must
        # contain the letter appended last, so suffix matching is complete.
        rules = self.rules
        out = bytearray()
        pending = list(seq)
        pending.reverse()
        while pending:
            out.append(pending.pop())
            matched = True
            while matched:
                matched = False
                for lhs, rhs in rules:
                    n = len(lhs)
                    if len(out) >= n and out[-n:] == lhs:
                        del out[-n:]
                        pending.extend(reversed(rhs))
                        if pending:
                            out.append(pending.pop())
                            matched = True
                        break
        return bytes(out)

    def extend(self, ids: bytes, letter: int) -> bytes:
        """Normal form of (normal word) * (single generator). Hot BFS path."""
        if self.kind == "free":
            if ids and self.alphabet.involution[ids[-1]] == letter:
                return ids[:-1]
            return ids + bytes([letter])
        return self._reduce_generic(ids + bytes([letter]))

    def invert_ids(self, ids: bytes) -> bytes:
        inv = self.alphabet.involution
        return self.reduce(bytes(inv[c] for c in reversed(ids)))

    def multiply_ids(self, x: bytes, y: bytes) -> bytes:
        if self.kind == "free":
            # cancellation happens only at the junction
            inv = self.alphabet.involution
            i = len(x)
            j = 0
            while i > 0 and j < len(y) and inv[x[i - 1]] == y[j]:
                i -= 1
                j += 1
            return x[:i] + y[j:]
        return self._reduce_generic(x + y)


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def _check_local_confluence(backend: GroupBackend) -> None:
    """Critical-pair scan.  Rules are terminating (order-reducing), so local
    confluence on overlaps is enough for global confluence."""
    rules = backend.rules
    reduce = backend._reduce_generic
    for l1, r1 in rules:
        for l2, r2 in rules:
            for o in range(len(l1)):
                end = o + len(l2)
                if end <= len(l1):
                    if l1[o:end] != l2:
                        continue
                    if (l1, r1) == (l2, r2) and o == 0 and end == len(l1):
                        continue  # a rule trivially overlaps itself in place
                    word = l1
                    a = r1
                    b = l1[:o] + r2 + l1[end:]
                else:
                    k = len(l1) - o
                    if k <= 0 or l1[o:] != l2[:k]:
                        continue
                    word = l1 + l2[k:]
                    a = r1 + l2[k:]
                    b = l1[:o] + r2
                na, nb = reduce(a), reduce(b)
                if na != nb:
                    raise NotLocallyConfluent(
                        "critical pair "
                        f"{backend._fmt(word)} resolves to both "
                        f"{backend._fmt(na)} and {backend._fmt(nb)}"
                    )


def free_group(rank: int) -> GroupBackend:
    """Free group of the given rank with letters a, a-, b, b-, ..."""
    if not isinstance(rank, int) or rank < 1:
        raise BadSpec(f"free group rank must be a positive integer, got {rank!r}")
    if rank > len(ascii_lowercase):
        raise BadSpec(f"free group rank {rank} exceeds the letter supply")
    letters: list[str] = []
    involution: list[int] = []
    for i in range(rank):
        base = ascii_lowercase[i]
        letters += [base, base + "-"]
        involution += [2 * i + 1, 2 * i]
    alphabet = Alphabet(tuple(letters), tuple(involution))
    rules = tuple(
        (bytes([i, alphabet.involution[i]]), b"") for i in range(len(letters))
    )
    return GroupBackend(
        kind="free",
        alphabet=alphabet,
        rules=rules,
        rank=rank,
        elementary=(rank == 1),
    )


def _cyclic_factor_rules(pos: int, neg: int | None, order: int) -> list[Rule]:
    """Rules spelling Z/order with shortlex-minimal exponents.

    Syllables b^e are spelled with the positive letter for e <= order/2
    (ties at even order go positive) and with the inverse letter otherwise.
    """
    if order == 2:
        return [(bytes([pos, pos]), b"")]
    assert neg is not None
    rules: list[Rule] = [
        (bytes([pos, neg]), b""),
        (bytes([neg, pos]), b""),
    ]
    half = order // 2
    if order % 2 == 1:
        # b^(half+1) -> (b-)^half and symmetrically
        rules.append((bytes([pos] * (half + 1)), bytes([neg] * half)))
        rules.append((bytes([neg] * (half + 1)), bytes([pos] * half)))
    else:
        # the halfway element is spelled positively (shortlex tie-break)
        rules.append((bytes([pos] * (half + 1)), bytes([neg] * (half - 1))))
        rules.append((bytes([neg] * half), bytes([pos] * half)))
    return rules


def compile_cyclicprod(orders: Sequence[int]) -> GroupBackend:
    """Free product of cyclic groups Z/m1 * Z/m2 * ... as an RWS backend."""
    orders = tuple(orders)
    if not orders:
        raise InvalidOrder("at least one cyclic factor is required")
    for m in orders:
        if not isinstance(m, int) or m < 2:
            raise InvalidOrder(f"cyclic factor order must be an integer >= 2, got {m!r}")
    if len(orders) > len(ascii_lowercase):
        raise InvalidOrder(f"{len(orders)} factors exceed the letter supply")
    letters: list[str] = []
    involution: list[int] = []
    rules: list[Rule] = []
    for f, m in enumerate(orders):
        base = ascii_lowercase[f]
        pos = len(letters)
        if m == 2:
            letters.append(base)
            involution.append(pos)
            rules += _cyclic_factor_rules(pos, None, m)
        else:
            letters += [base, base + "-"]
            involution += [pos + 1, pos]
            rules += _cyclic_factor_rules(pos, pos + 1, m)
    alphabet = Alphabet(tuple(letters), tuple(involution))
    elementary = len(orders) == 1 or orders == (2, 2)
    return GroupBackend(
        kind="cyclicprod",
        alphabet=alphabet,
        rules=tuple(rules),
        orders=orders,
        elementary=elementary,
    )


def loads_rws(text: str) -> GroupBackend:
    """Parse an RWS description from a string (see load_rws for the format)."""
    letters: tuple[str, ...] | None = None
    involution: list[int] | None = None
    alphabet: Alphabet | None = None
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if letters is None:
            if not line.startswith("letters:"):
                raise ParseError(f"line {lineno}: expected 'letters:' declaration")
            letters = tuple(line[len("letters:"):].split())
            if not letters:
                raise ParseError(f"line {lineno}: empty letter list")
            continue
        if involution is None:
            if not line.startswith("inverses:"):
                raise ParseError(f"line {lineno}: expected 'inverses:' declaration")
            mapping: dict[str, str] = {}
            for item in line[len("inverses:"):].split():
                if ":" not in item:
                    raise ParseError(f"line {lineno}: bad inverse pair {item!r}")
                a, b = item.split(":", 1)
                mapping[a] = b
                mapping.setdefault(b, a)
            missing = [name for name in letters if name not in mapping]
            if missing:
                raise AsymmetricAlphabet(f"letters without declared inverse: {missing}")
            unknown = [name for name in mapping if name not in letters]
            if unknown:
                raise ParseError(f"line {lineno}: inverse of undeclared letter {unknown}")
            involution = [letters.index(mapping[name]) for name in letters]
            alphabet = Alphabet(letters, tuple(involution))
            continue
        if "->" not in line:
            raise ParseError(f"line {lineno}: expected 'lhs -> rhs'")
        lhs_txt, rhs_txt = (part.strip() for part in line.split("->", 1))

        def side(txt: str) -> bytes:
            if txt == "eps":
                return b""
            try:
                return bytes(letters.index(name) for name in txt.split())
            except ValueError as exc:
                raise ParseError(f"line {lineno}: unknown letter in rule: {exc}")

        rules.append((side(lhs_txt), side(rhs_txt)))
    if alphabet is None:
        raise ParseError("missing 'letters:'/'inverses:' declarations")
    return GroupBackend(kind="rws", alphabet=alphabet, rules=tuple(rules))


def load_rws(path: str) -> GroupBackend:
    """Load a rewriting system from a UTF-8 file.

    Format (line oriented, ``#`` starts a comment)::

        letters: a a- b b-        # declaration order = shortlex order
        inverses: a:a- b:b-       # self-inverse letters map to themselves
        b b -> b-                 # rules; 'eps' denotes the empty word

    The rule set is validated: every rule must strictly decrease shortlex
    order and all critical pairs must resolve to a common reduct.
    """
    with open(path, "r", encoding="utf-8") as fh:
        return loads_rws(fh.read())


# ---------------------------------------------------------------------------
# word operations
# ---------------------------------------------------------------------------


def _own_word(backend: GroupBackend, w: Word) -> None:
    if w.alphabet is not backend.alphabet and w.alphabet != backend.alphabet:
        raise UnknownLetter("word belongs to a different alphabet")


def normalize(backend: GroupBackend, raw: Iterable[str] | Word | bytes) -> Word:
    """Normal form of a letter sequence.  Idempotent."""
    if isinstance(raw, Word):
        _own_word(backend, raw)
        ids = raw.ids
    elif isinstance(raw, (bytes, bytearray)):
        ids = bytes(raw)
        if any(c >= len(backend.alphabet) for c in ids):
            raise UnknownLetter("letter index out of range")
    else:
        ids = backend.parse_letters(raw)
    return backend.word(backend.reduce(ids))


def multiply(backend: GroupBackend, x: Word, y: Word) -> Word:
    _own_word(backend, x)
    _own_word(backend, y)
    return backend.word(backend.multiply_ids(x.ids, y.ids))


def invert(backend: GroupBackend, x: Word) -> Word:
    _own_word(backend, x)
    return backend.word(backend.invert_ids(x.ids))


def gromov_product(backend: GroupBackend, x: Word, y: Word) -> Fraction:
    """(x, y) = (|x| + |y| - |x^-1 y|) / 2 as an exact half-integer."""
    _own_word(backend, x)
    _own_word(backend, y)
    d = len(backend.multiply_ids(backend.invert_ids(x.ids), y.ids))
    return Fraction(len(x.ids) + len(y.ids) - d, 2)


@dataclass(frozen=True)
class HyperbolicityEstimate:
    """Largest observed 4-point defect over a ball (a lower bound for delta)."""

    delta_hat: Fraction
    radius: int


def estimate_delta(backend: GroupBackend, radius: int) -> HyperbolicityEstimate:
    """Exhaustive max over x, y, z in B_R of min((x,z),(y,z)) - (x,y).

    Works on doubled integer Gromov products throughout, so the result is
    exact.  Guarded: the scan is cubic in |B_R|.
    """
    import numpy as np

    from .enumeration import build_ball_index
    from .errors import CapExceeded

    try:
        ball = build_ball_index(backend, radius, cap=DELTA_BALL_GUARD)
    except CapExceeded:
        raise BallTooLarge(
            f"|B_{radius}| exceeds the triple-scan guard {DELTA_BALL_GUARD}"
        )
    words = [w.ids for w in ball.words]
    n = len(words)
    lengths = [len(w) for w in words]
    inverses = [backend.invert_ids(w) for w in words]
    gp2 = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        xi = inverses[i]
        li = lengths[i]
        row = gp2[i]
        for j in range(n):
            row[j] = li + lengths[j] - len(backend.multiply_ids(xi, words[j]))
    best = 0
    for i in range(n):
        # per y: max over z of min((x,z),(y,z)), then compare with (x,y)
        cap_xy = np.minimum(gp2[i][None, :], gp2).max(axis=1) - gp2[i]
        m = int(cap_xy.max())
        if m > best:
            best = m
    return HyperbolicityEstimate(delta_hat=Fraction(max(best, 0), 2), radius=radius)
