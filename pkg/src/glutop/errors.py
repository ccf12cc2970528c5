"""Exception types and validation report records shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class GlutopError(Exception):
    """Base class for every error raised by this package."""

    def __init__(self, message: str = "", witness: Any = None):
        super().__init__(message)
        self.witness = witness

    @property
    def kind(self) -> str:
        return type(self).__name__


class ParseError(GlutopError):
    """Malformed input file or unknown keys."""


class ExplosionLimit(GlutopError):
    """An enumeration exceeded its candidate cap."""


class UnknownObject(GlutopError):
    """An object id is not part of the category."""


class NotMono(GlutopError):
    """A map expected to be monic is not injective."""


class NotGroupoid(GlutopError):
    """The index category has a non-invertible morphism."""


class NotPowerful(GlutopError):
    """No dependent product former is available."""


class MissingCapability(GlutopError):
    """A category handle lacks a required operation."""


class SliceMismatch(GlutopError):
    """Maps do not live over the expected base."""


class ShapeMismatch(GlutopError):
    """Functor and diagram index categories disagree."""


class InvalidCategory(GlutopError):
    """Category data failed validation."""


class InvalidDiagram(GlutopError):
    """Diagram data failed validation."""


class ReconstructionFailed(GlutopError):
    """Iterated collage is not isomorphic to the input."""


class CompatibilityViolation(GlutopError):
    """Former is not stable under restriction."""


class GenerationFailed(GlutopError):
    """Random generator could not satisfy its bounds."""


class SaturationBudgetExceeded(GlutopError):
    """Localization did not saturate within caps."""


class EpiAssumptionFailed(GlutopError):
    """Some morphism of the localized category is not epi."""


class DecompositionUnavailable(GlutopError):
    """Comparison decomposition needs an invertible kappa."""


class NotWide(GlutopError):
    """Weak equivalences miss an identity."""


class TwoOfThreeViolation(GlutopError):
    """Weak equivalences are not closed under 2-out-of-3."""


@dataclass(frozen=True)
class Violation:
    """One entry of a validation report."""

    kind: str
    message: str
    witness: Any = field(default=None, compare=False)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message}

