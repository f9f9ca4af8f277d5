"""Exception hierarchy shared by every module of the package."""


class OrientifoldError(Exception):
    """Base class for all package errors."""


# groups
class NotAGroup(OrientifoldError):
    pass


class EpsNotHomomorphism(OrientifoldError):
    pass


class EpsTrivial(OrientifoldError):
    pass


class InfiniteCarrier(OrientifoldError):
    pass


# clifford / spin
class DimensionMismatch(OrientifoldError):
    pass


class NotComplexified(OrientifoldError):
    pass


class NotGrade1(OrientifoldError):
    pass


class NotUnitVector(OrientifoldError):
    pass


class SampleNotRepresentable(OrientifoldError):
    pass


class UnsupportedDimension(OrientifoldError):
    pass


# cech
class DomainMismatch(OrientifoldError):
    pass


class CoverMismatch(OrientifoldError):
    pass


class NonAbelianCoefficient(OrientifoldError):
    pass


class DenominatorBoundExceeded(OrientifoldError):
    pass


class UnliftableValue(OrientifoldError):
    pass


# search
class BudgetExceeded(OrientifoldError):
    pass


# lattice / bundles
class NotPositiveDefinite(OrientifoldError):
    pass


class IncompatibleFibers(OrientifoldError):
    pass


class ReducedModelHasNoRightAction(OrientifoldError):
    pass


class ActionDoesNotLift(OrientifoldError):
    """The requested lattice isometry has no Spin lift forming a group action."""


class TooLarge(OrientifoldError):
    pass
