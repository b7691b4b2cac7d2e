"""Exception hierarchy shared by every module of the package."""


class LCUError(Exception):
    """Base class for all errors raised by :mod:`lcu`."""


class InvalidParameter(LCUError, ValueError):
    pass


class GraphError(LCUError, ValueError):
    """A graph violates one of the structural requirements of the system."""


class DisconnectedGraph(GraphError):
    pass


class MissingClass(GraphError):
    def __init__(self, missing):
        self.missing = tuple(int(c) for c in missing)
        names = ", ".join(str(c) for c in self.missing)
        super().__init__(f"no labeled vertex for class(es) {names}")


class GenerationFailed(LCUError, RuntimeError):
    pass


class ParseError(LCUError, ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class UndefinedCorrelation(LCUError, ValueError):
    pass
