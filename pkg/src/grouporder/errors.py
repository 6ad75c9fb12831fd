"""Exception types shared across the package."""


class GroupError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(GroupError):
    pass


class ReduciblePolynomial(GroupError):
    pass


class NoPrimitiveFound(GroupError):
    pass


class FieldTooLarge(GroupError):
    pass


class InvalidCode(GroupError):
    """An oracle received a string that encodes no group element."""


class NotBijection(GroupError):
    pass


class SingularGenerator(GroupError):
    pass


class SpecParseError(GroupError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndexOutOfRange(GroupError):
    pass


class NotAMember(GroupError):
    pass


class CapExceeded(GroupError):
    """A brute-force routine would have to enumerate more elements than allowed."""


class BoundUnreachable(GroupError):
    pass


class NotNormal(GroupError):
    pass


class NotSolvable(GroupError):
    pass


class NotSolvableInput(NotSolvable):
    pass


class NotSimple(GroupError):
    pass


class AmbiguousOrder(GroupError):
    pass


class UnknownOrder(GroupError):
    pass


class UnknownFactor(GroupError):
    pass


class UnsupportedName(GroupError):
    pass


class UnsupportedFactor(GroupError):
    pass


class NotInValidSet(GroupError):
    pass


class PreconditionViolated(GroupError):
    pass


class UnsupportedKind(GroupError):
    pass


class WitnessFormatError(GroupError):
    pass
