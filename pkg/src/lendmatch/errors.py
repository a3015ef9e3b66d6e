"""Exception types shared across the package."""


class LendmatchError(Exception):
    """Base class for all package-specific errors."""


class AttemptCapExceeded(LendmatchError):
    """Rejection sampling could not produce a feasible instance."""


class TiedUtilities(LendmatchError):
    """A utility row contains duplicate values (strict preferences required)."""


class DimensionMismatch(LendmatchError):
    """Matrix shapes are inconsistent with the instance dimensions."""


class BudgetExceeded(LendmatchError):
    """Enumeration budget too small for the requested instance."""


class NodeLimitExceeded(LendmatchError):
    """Exact solver ran out of branch-and-bound nodes."""

    def __init__(self, nodes, best=None):
        super().__init__(f"node limit reached after {nodes} nodes")
        self.nodes = nodes
        self.best = best


class InvalidHorizon(LendmatchError):
    """Simulation horizon must be >= 1."""


class InfeasibleMatching(LendmatchError):
    """The per-step matching problem had no covering assignment."""

    def __init__(self, step, certificate=None):
        super().__init__(f"matching infeasible at step {step}")
        self.step = step
        self.certificate = certificate


class ModeUnknown(LendmatchError):
    """Unrecognised regret mode."""


class ShapeMismatch(LendmatchError):
    """Run results disagree on dimensions or horizon."""


class ConfigError(LendmatchError):
    """Base class for configuration file problems."""

    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key


class ParseError(ConfigError):
    """Malformed configuration line."""


class UnknownKey(ConfigError):
    """Configuration key is not recognised."""


class InvalidValue(ConfigError):
    """Configuration value failed validation."""
