"""Exception hierarchy shared by all whorlsim modules."""


class WhorlError(Exception):
    """Base class for every error raised by whorlsim."""


class FieldSyntaxError(WhorlError):
    """Base for problems in a textual field definition."""


class LexError(FieldSyntaxError):
    def __init__(self, offset, char=""):
        self.offset = offset
        self.char = char
        super().__init__(f"unexpected character {char!r} at offset {offset}")


class ParseError(FieldSyntaxError):
    def __init__(self, offset, expected, found=""):
        self.offset = offset
        self.expected = expected
        self.found = found
        msg = f"expected {expected} at offset {offset}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class UnboundParam(WhorlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"parameter {name!r} has no binding")


class NumericalError(WhorlError):
    """Base for failures of the numerical machinery."""


class NonFinite(NumericalError):
    def __init__(self, where="", state=None):
        self.state = state
        super().__init__(f"non-finite value encountered {where}".strip())


class StepUnderflow(NumericalError):
    pass


class NewtonStall(NumericalError):
    def __init__(self, point):
        self.point = tuple(point)
        super().__init__(f"Newton iteration stalled near {self.point}")


class NormalFormError(NumericalError):
    """Base for failures of the double-zero normal form extraction."""


class NotSecondOrderShape(NormalFormError):
    pass


class NotDoubleZero(NormalFormError):
    pass


class FlatField(NormalFormError):
    pass
