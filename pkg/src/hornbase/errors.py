"""Exception hierarchy. CLI exit codes hang off the ``exit_code`` attribute."""


class HornbaseError(Exception):
    exit_code = 2


class ParseError(HornbaseError):
    def __init__(self, message, line=None, column=None, path=None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:{column or 1}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class WellFormednessError(ParseError):
    """Semantic violation: unsafe clause, non-ground fact, view/base clash..."""


class ArityError(HornbaseError):
    pass


class PreconditionError(HornbaseError):
    """Request is not a true view update (or similar contract violation)."""


class NoRealizationError(HornbaseError):
    exit_code = 1


class ResourceCapError(HornbaseError):
    exit_code = 3


class IterationCapError(ResourceCapError):
    pass
