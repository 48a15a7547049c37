"""Exception hierarchy shared by all varpick modules."""


class VarpickError(Exception):
    """Base class for every error raised by the package."""


class DegenerateFiber(VarpickError):
    """The w-degree of p(z, .) drops at this z (leading coefficient vanishes)."""

    def __init__(self, z, message=None):
        self.z = complex(z)
        super().__init__(message or f"degenerate fiber at z={self.z!r}")


class SquareFreeViolation(VarpickError):
    pass


class MixedRegion(VarpickError):
    """A point whose coordinates do not share a modulus class (|z|<1<|w| etc.)."""


class NotOnVariety(VarpickError):
    pass


class ExhaustedSampling(VarpickError):
    pass


class OriginReflection(VarpickError):
    pass


class GenericSearchFailed(VarpickError):
    pass


class ShapeMismatch(VarpickError):
    pass


class RankDeficientEverywhere(VarpickError):
    pass


class IdentityViolation(VarpickError):
    def __init__(self, message, witness=None, residual=None):
        self.witness = witness
        self.residual = residual
        super().__init__(message)


class DenominatorBlowup(VarpickError):
    pass


class FormDisagreement(VarpickError):
    pass


class PSDViolation(VarpickError):
    def __init__(self, message, min_eig=None):
        self.min_eig = min_eig
        super().__init__(message)


class NotNormalized(VarpickError):
    pass


class ZeroDirection(VarpickError):
    pass


class FactorizationMismatch(VarpickError):
    pass


class CoincidentNodes(VarpickError):
    pass


class InconsistentGenerators(VarpickError):
    pass


class CompletionDegenerate(VarpickError):
    pass


class ResolventSingular(VarpickError):
    pass


class AllCoordinatesVanish(VarpickError):
    pass


class NotHermitian(VarpickError):
    pass


class SingularGram(VarpickError):
    pass


class OriginNode(VarpickError):
    pass


class ZeroOnBoundary(VarpickError):
    pass


class SchemaError(VarpickError):
    """Malformed JSON input; ``path`` is a JSON pointer to the offending node."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path or '/'}: {message}")
