"""Exception types raised by the o2i package."""


class O2IError(Exception):
    """Base class for all package errors."""


class DomainError(O2IError, ValueError):
    """An argument lies outside the domain of a formula or geometric construction."""


class RangeError(O2IError, ValueError):
    """A baseline model was evaluated outside its validity range."""


class DegenerateFit(O2IError, ValueError):
    """Least-squares fit is undetermined (fewer than two distinct ranges)."""


class NoCoverage(O2IError):
    """SNR is already below threshold at the start of the search window."""


class NonMonotone(O2IError):
    """A range profile increases where it was required to be non-increasing."""


class SceneError(O2IError, ValueError):
    """Malformed scene description."""


class GeometryError(O2IError, ValueError):
    """A terminal or site is not placed where the model needs it."""
