"""Exception hierarchy.

Exit-code mapping used by the CLI: ValidationError and its subclasses signal bad
or inadmissible data (exit 2); ResolutionError signals a numerical-resolution
refusal (exit 3).
"""


class DnlsIstError(Exception):
    """Base class for all library errors."""


class ValidationError(DnlsIstError):
    """Input data violate a structural constraint."""


class SchemaError(ValidationError):
    """A serialized document does not match the expected schema."""


class ConstraintError(ValidationError):
    """Scattering-data constraints (reflection relation / positivity) violated."""


class ResonanceError(ValidationError):
    """min |a| on the real grid fell below the resonance threshold."""


class ResolutionError(DnlsIstError):
    """The requested computation is not resolvable on the given grids."""


class SingularSystemError(DnlsIstError):
    """Dense solve hit a (near-)singular matrix."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class EigenvalueSearchError(DnlsIstError):
    """Winding count and refined roots disagree, or refinement failed."""


class NormingConstantError(DnlsIstError):
    """The norming-constant ratio varied too much across x."""


class InvertibilityError(DnlsIstError):
    """A dressing matrix lost invertibility (signals upstream corruption)."""


class ResidueMismatchError(DnlsIstError):
    """A dressed solution failed its residue-condition verification."""


class BlowUpError(DnlsIstError):
    """The PDE integrator aborted on the amplitude guard."""
