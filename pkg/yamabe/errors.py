"""Exception hierarchy shared by the library and the CLI.

The CLI maps these classes onto exit codes (see ``yamabe.cli.EXIT_CODES``).
"""


class YamabeError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(YamabeError, ValueError):
    """Dimension below the admissible range (m < 3, k outside 2..m-4, ...)."""


class DomainError(YamabeError, ValueError):
    """Argument outside the domain of a formula (negative mu, nonpositive volume, ...)."""


class ManifoldError(YamabeError, ValueError):
    """Invalid discrete manifold or a field that does not fit it."""


class BudgetExceeded(ManifoldError):
    """Construction would exceed the configured vertex budget."""


class SpecError(ManifoldError):
    """A ManifoldSpec document failed to parse; the message names the field path."""


class AssumptionViolated(YamabeError):
    """The curvature hypothesis of the product lower bound fails at some vertex pair."""


class DescriptorError(YamabeError, ValueError):
    """A geometry descriptor on the command line failed to parse."""
