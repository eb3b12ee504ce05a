class InstantonError(Exception):
    """Base class for every error raised by the toolkit"""


class ShapeMismatch(InstantonError):
    pass


class SingularMatrix(InstantonError):
    pass


class NoSolution(InstantonError):
    pass


class NotInSummand(InstantonError):
    """Tensor has a nonzero component in the wedge^2 H (x) S^2 V summand"""


class RankMismatch(InstantonError):
    def __init__(self, found: int, required: int):
        super().__init__(f"rank {found} found, {required} required")
        self.found = found
        self.required = required


class NonInjectiveTau(InstantonError):
    pass


class SingularG(InstantonError):
    pass


class SingularB(InstantonError):
    pass


class SingularD(InstantonError):
    pass


class ConditionIrViolated(InstantonError):
    pass


class NotFound(InstantonError):
    def __init__(self, message: str, attempts: int = 0, rejections: dict = None):
        super().__init__(message)
        self.attempts = attempts
        self.rejections = rejections or {}


class ParameterError(InstantonError):
    pass


class PreconditionViolation(InstantonError):
    pass


class FileFormatError(InstantonError):
    pass


class PrimeMismatch(InstantonError):
    pass
