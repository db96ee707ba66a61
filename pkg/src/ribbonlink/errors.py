"""Exception types raised by ribbonlink."""


class RibbonError(ValueError):
    """Base class for all ribbonlink errors."""


class ValidationError(RibbonError):
    """Input geometry or configuration rejected before computation."""


class TooFewSamples(ValidationError):
    pass


class DegenerateSegment(ValidationError):
    pass


class SelfIntersecting(ValidationError):
    pass


class ClosureGap(ValidationError):
    pass


class UnknownFamily(ValidationError):
    pass


class BadParameter(ValidationError):
    pass


class ZeroDerivative(ValidationError):
    pass


class ParallelToTangent(ValidationError):
    pass


class CurvesTooClose(ValidationError):
    pass


class AntipodalEdge(ValidationError):
    pass


class UndefinedNormal(ValidationError):
    def __init__(self, indices, message=None):
        self.indices = list(indices)
        super().__init__(message or f"normal undefined at {len(self.indices)} sample(s), first {self.indices[:5]}")


class DiscontinuousFraming(RibbonError):
    def __init__(self, indices, message=None):
        self.indices = list(indices)
        super().__init__(message or f"framing flips between consecutive samples at {self.indices[:5]}")


class DegenerateDirection(RibbonError):
    """Projection direction is (numerically) non-generic; retry with another one."""


class TooManyRetries(RibbonError):
    pass


class VerificationFailed(RibbonError):
    pass


class UnwrapAmbiguity(RibbonError):
    pass
