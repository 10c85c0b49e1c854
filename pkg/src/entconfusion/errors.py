"""Exception hierarchy shared by all modules."""


class EntConfusionError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(EntConfusionError, ValueError):
    """Invalid or unsupported dimension."""


class ShapeError(EntConfusionError, ValueError):
    """Array shapes do not match the declared subsystem structure."""


class DomainError(EntConfusionError, ValueError):
    """A parameter or matrix lies outside the domain of an operation."""


class NormError(DomainError):
    """A vector that must be normalized (or nonzero) is not."""


class SymmetryError(DomainError):
    """A matrix expected to be Hermitian is not."""


class UnitarityError(DomainError):
    """A matrix expected to be unitary is not."""


class StateError(DomainError):
    """A matrix fails the density-matrix invariants."""


class ChannelError(DomainError):
    """A Kraus set is not trace preserving."""


class ConstructionError(EntConfusionError):
    """A SIC-POVM failed its validity checks at build time."""


class DataError(EntConfusionError, ValueError):
    """Empty, degenerate or malformed datasets."""


class DivergenceError(EntConfusionError, FloatingPointError):
    """Training produced a non-finite loss."""


class NoPeakError(EntConfusionError):
    """An accuracy curve has no discernible interior maximum."""


class FixtureError(EntConfusionError, KeyError):
    """Unknown fixture name or invalid fixture parameters."""
