"""Exception hierarchy.

Validation problems derive from ``ValidationError`` (a ``ValueError``); the
CLI maps them to exit code 2.  ``InstanceTooLarge`` maps to 3 and numeric
domain problems (``DomainViolation``, ``ZeroLikelihood``) map to 4.
"""


class MotifMapError(Exception):
    pass


class ValidationError(MotifMapError, ValueError):
    pass


class OverlappingSites(ValidationError):
    pass


class SiteOutOfRange(ValidationError):
    pass


class SiteCrossesBoundary(SiteOutOfRange):
    pass


class UnknownMotifIndex(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NonPositivePseudoCount(ValidationError):
    pass


class EmptyDictionary(ValidationError):
    pass


class CountsTooSmall(ValidationError):
    pass


class TooFewIterations(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


class ZeroBackgroundProbability(ValidationError):
    pass


class SupportMismatch(ValidationError):
    pass


class PseudoCountSumNotOne(ValidationError):
    pass


class MultiMotifUnsupported(ValidationError):
    pass


class InfeasiblePlacement(ValidationError):
    pass


class InstanceTooLarge(MotifMapError):
    pass


class DomainViolation(MotifMapError, ValueError):
    pass


class ZeroLikelihood(DomainViolation):
    pass
