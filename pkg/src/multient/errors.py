"""Exception hierarchy.

Every error raised by the library derives from :class:`EntanglementError`, and
the class name doubles as the diagnostic tag printed by the command line tool.
"""


class EntanglementError(Exception):
    """Base class for all library errors."""


class StateFormatError(EntanglementError, ValueError):
    """A state or circuit file could not be parsed."""


class DimensionMismatch(EntanglementError, ValueError):
    pass


class NotNormalized(EntanglementError, ValueError):
    pass


class ZeroState(EntanglementError, ValueError):
    pass


class TooFewParts(EntanglementError, ValueError):
    pass


class BadBipartition(EntanglementError, ValueError):
    pass


class NonPositiveTolerance(EntanglementError, ValueError):
    pass


class PhaseCountMismatch(EntanglementError, ValueError):
    pass


class NonOrthonormalRightStates(EntanglementError, ValueError):
    pass


class SizeMismatch(EntanglementError, ValueError):
    pass


class NonUnitary(EntanglementError, ValueError):
    pass


class NotThreeQubits(EntanglementError, ValueError):
    pass


class NotMaximal(EntanglementError):
    """The state does not reach M = 1 on every single-qubit bipartition."""


class BranchResolutionFailure(EntanglementError):
    """No case of the three-qubit analysis fits the extracted parameters."""


class DimensionTooLarge(EntanglementError, ValueError):
    pass


class InvalidDensityMatrix(EntanglementError, ValueError):
    pass
