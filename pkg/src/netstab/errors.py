"""Exception hierarchy shared by all netstab modules."""


class NetstabError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(NetstabError, ValueError):
    """An argument is outside the documented domain of an operation."""


class GraphParseError(InvalidArgument):
    """Malformed edge-list text. ``line`` is 1-based, or None for whole-file errors."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ExhaustedAttempts(NetstabError, RuntimeError):
    """A randomized generator hit its retry bound."""


class NumericalFailure(NetstabError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class StiffnessError(NumericalFailure):
    """Adaptive step size collapsed below the underflow limit."""


class MarginalNode(NetstabError):
    """The node linearization has an eigenvalue with zero real part."""


class NotStabilizable(NetstabError):
    """0 lies in the Laplacian spectrum, so coupling alone cannot stabilize unstable nodes."""


class NotAnEquilibrium(NetstabError):
    """The reference state is not an equilibrium of the node dynamics."""


class NoSolution(NetstabError):
    """The Lyapunov equation has no positive-definite solution (matrix not Hurwitz)."""
