"""Exception hierarchy.  Every failure the toolkit signals derives from QTwistError."""


class QTwistError(Exception):
    pass


class StructureError(QTwistError):
    """A field or module violates its algebraic relations."""


class DegenerateKernel(QTwistError):
    pass


class OrientationMismatch(QTwistError):
    pass


class EigenspaceDimensionError(QTwistError):
    pass


class FrameDegeneracy(QTwistError):
    pass


class UndersampledLoop(QTwistError):
    pass


class InconsistentStaircase(QTwistError):
    pass


class RankPlateauMissing(QTwistError):
    """Singular values show no clear gap; the kernel dimension is indeterminate."""


class TypeMismatch(QTwistError):
    pass


class IllConditionedFit(QTwistError):
    pass


class InversionFailure(QTwistError):
    pass


class ConjugatePair(QTwistError):
    pass


class InconsistentVerdict(QTwistError):
    """Condition (i) holds but the twistor structure is not integrable."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
