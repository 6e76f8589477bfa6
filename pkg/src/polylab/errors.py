"""Semantic exception hierarchy for polylab.

Public functions raise these instead of bare ValueError so callers (and the
CLI exit-code mapping) can distinguish capacity blowups from domain misuse.
"""


class PolylabError(Exception):
    """Base class for all polylab errors."""


class DomainError(PolylabError, ValueError):
    """Argument outside the mathematical domain (e.g. log-domain violated)."""


class RangeError(PolylabError, ValueError):
    """Argument outside a law's finite-MGF range or a configured range."""


class NoRootError(PolylabError):
    """Root finding failed: the target is not attainable below the cap."""


class InvalidRegimeError(PolylabError, ValueError):
    """Coupling schedule violates its regime constraints."""


class CapacityError(PolylabError):
    """Requested computation exceeds the configured state/memory budget."""


class ConeError(PolylabError, ValueError):
    """Environment slab does not cover the cone required by a walk."""


class OverflowGuardError(PolylabError):
    """Accumulated weight left the representable (log-space) range."""


class GateError(PolylabError):
    """A regime gate required by a bound evaluation is not satisfied."""


class QuadratureError(PolylabError):
    """Adaptive quadrature failed to reach the requested tolerance."""
