"""Exception hierarchy shared by all modules."""


class CorrthermError(Exception):
    """Base class for all library errors."""


class NegativeEntry(CorrthermError):
    pass


class NotNormalized(CorrthermError):
    pass


class DimensionMismatch(CorrthermError):
    pass


class LambdaOutOfRange(CorrthermError):
    pass


class OutOfRange(CorrthermError):
    pass


class NotMajorized(CorrthermError):
    pass


class EqualUpToPermutation(CorrthermError):
    pass


class BothRankDeficient(CorrthermError):
    pass


class NotThermomajorized(CorrthermError):
    pass


class SolverBudgetExceeded(CorrthermError):
    pass


class InfeasibleAtUpperBound(CorrthermError):
    pass


class RankDeficient(CorrthermError):
    pass


class DeltaOutOfRange(CorrthermError):
    pass


class TooLargeToMaterialize(CorrthermError):
    pass


class EntropyConditionViolated(CorrthermError):
    pass


class BudgetExceeded(CorrthermError):
    pass


class RankCondition(CorrthermError):
    pass


class CapExceeded(CorrthermError):
    pass


class FreeEnergyViolation(CorrthermError):
    pass


class SinkTooSmall(CorrthermError):
    pass


class BadShape(CorrthermError):
    pass
