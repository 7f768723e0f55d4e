"""Exception types shared across the library.

Every error that callers are expected to catch has its own class; all of
them derive from HyplabError so CLI entry points can map library failures
to exit codes without enumerating each one.
"""


class HyplabError(Exception):
    """Base class for all library errors."""


class BadSpec(HyplabError):
    """A group or element specifier string does not match the grammar."""


class UnknownLetter(HyplabError):
    """A letter outside the backend's alphabet was supplied."""


class ParseError(HyplabError):
    """A rewriting-system file is syntactically malformed."""


class AsymmetricAlphabet(HyplabError):
    """The declared involution is not a self-inverse bijection on the letters."""


class NonReducingRule(HyplabError):
    """A rewriting rule does not strictly decrease shortlex order."""


class NotLocallyConfluent(HyplabError):
    """A critical pair of the rule set has two distinct normal forms."""


class InvalidOrder(HyplabError):
    """A cyclic-factor order below 2 (or otherwise unusable) was requested."""


class BallTooLarge(HyplabError):
    """The ball exceeds the feasibility guard for exhaustive triple scans."""


class CapExceeded(HyplabError):
    """Enumeration would exceed the element cap; lower the radius instead."""


class InsufficientData(HyplabError):
    """Too few data points for the requested fit."""


class MissingSizes(HyplabError):
    """Sphere sizes do not cover the degree of a radial element."""


class DimensionMismatch(HyplabError):
    """A vector does not match the dimension of the compressed operator."""


class NotFreeBackend(HyplabError):
    """An operation that needs the exact free-group oracle got another backend."""


class ElementaryGroup(HyplabError):
    """The group is finite or two-ended; it has no usable boundary model."""


class UnsupportedBackend(HyplabError):
    """The operation is not available for this backend kind."""


class NotANormalFormRay(HyplabError):
    """A word is not accepted by the normal-form automaton."""


class DepthTooSmall(HyplabError):
    """A sampled ray is too shallow for a stable boundary computation."""
