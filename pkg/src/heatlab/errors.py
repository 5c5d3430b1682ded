"""Exception hierarchy shared by all heatlab modules."""

from __future__ import annotations


class HeatlabError(Exception):
    """Base class for every error raised by heatlab."""


class InvalidVertex(HeatlabError, KeyError):
    """A label is malformed or names no vertex of the graph."""

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return Exception.__str__(self)


class BudgetExceeded(HeatlabError):
    """A ball, frontier or support outgrew the configured vertex budget."""


class FormatError(HeatlabError, ValueError):
    """An input file does not follow the documented format."""


class DisconnectedError(HeatlabError, ValueError):
    def __init__(self, components: int):
        super().__init__(f"graph is disconnected ({components} components)")
        self.components = components


class SpecError(HeatlabError, ValueError):
    """A generator specification is unsupported or has bad parameters."""


class NumericalError(HeatlabError, ArithmeticError):
    """Floating-point mass drift exceeded tolerance."""


class ZeroMassError(HeatlabError, ZeroDivisionError):
    """A ratio was requested for a set of zero measure."""


class SearchCapExceeded(HeatlabError):
    """An exhaustive search was asked to enumerate too many subsets."""


class NoFeasibleSet(HeatlabError):
    """No candidate set satisfies the half-mass constraint."""


class GuardTooSmall(HeatlabError):
    """A component needed by a witness could not be confirmed finite."""


class DegeneratePartition(HeatlabError):
    """The heaviest component alone already carries half the mass."""


class UnsupportedGraph(HeatlabError, TypeError):
    """The operation needs a graph family this graph does not belong to."""


class ConfigError(HeatlabError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
