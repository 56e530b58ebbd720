"""Exception types raised across the package."""


class HTSpectrumError(ValueError):
    """Base class for all input and domain errors."""


class NegativeWeight(HTSpectrumError):
    pass


class DuplicateAtom(HTSpectrumError):
    pass


class LengthMismatch(HTSpectrumError):
    pass


class CapExceeded(HTSpectrumError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"product support size {size} exceeds atom cap {cap}")
        self.size = size
        self.cap = cap


class EmptyCommonSupport(HTSpectrumError):
    pass


class NegativeGamma(HTSpectrumError):
    pass


class NonpositiveGamma(HTSpectrumError):
    pass


class NegativeEpsilon(HTSpectrumError):
    pass


class EpsilonOutOfRange(HTSpectrumError):
    pass


class GammaOutOfBracket(HTSpectrumError):
    pass


class NonpositiveLambda(HTSpectrumError):
    pass


class NotEquivalent(HTSpectrumError):
    pass


class NotMonotoneLink(HTSpectrumError):
    pass


class DeltaOutOfRange(HTSpectrumError):
    pass


class DomainError(HTSpectrumError):
    pass


class NotProbability(HTSpectrumError):
    pass


class NotAbsolutelyContinuous(HTSpectrumError):
    pass


class EpsilonOutsideValidity(HTSpectrumError):
    def __init__(self, side: str, eps: float, lo: float, hi: float):
        super().__init__(f"{side}: eps={eps!r} outside validity interval ({lo!r}, {hi!r})")
        self.side = side


class DeltaTooLarge(HTSpectrumError):
    pass


class PhiOutsideValidity(HTSpectrumError):
    pass


class NonpositiveRho(HTSpectrumError):
    pass


class TooManyAtoms(HTSpectrumError):
    pass


class NoConvergence(HTSpectrumError):
    pass


class SchemaError(HTSpectrumError):
    pass
