"""Exception hierarchy shared by all modules."""


class ScenarioUCBError(Exception):
    """Base class for library errors."""


class ContractViolation(ScenarioUCBError, ValueError):
    """A precondition of an operation was not met by the caller."""


class InvalidSpecError(ContractViolation):
    """A kernel specification evaluates to an unusable configuration."""


class ScheduleError(ContractViolation):
    """A re-draw schedule violates ``1 <= alpha(t) <= t``."""


class ConfigError(ScenarioUCBError, ValueError):
    """An experiment configuration is malformed or out of range."""


class NumericalError(ScenarioUCBError, ArithmeticError):
    """A factorization or solve failed even after the allowed jitter."""

    def __init__(self, message, *, condition=None, iteration=None):
        self.condition = condition
        self.iteration = iteration
        parts = [message]
        if condition is not None:
            parts.append(f"condition number ~ {condition:.3e}")
        if iteration is not None:
            parts.append(f"at iteration t={iteration}")
        super().__init__("; ".join(parts))
