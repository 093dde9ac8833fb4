"""Exception hierarchy.

Validation problems (bad inputs, violated preconditions) derive from
``ValidationError``; failures detected while computing derive from
``SolverError``. The CLI maps the two families to exit codes 1 and 2.
"""


class HeliflowError(Exception):
    """Base class. ``stage`` is set when the error crossed a solver stage."""

    stage = None


class ValidationError(HeliflowError):
    pass


class SolverError(HeliflowError):
    pass


class ConfigError(ValidationError):
    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SonicRadialVelocity(SolverError):
    pass


class VacuumOrInvalid(SolverError):
    pass


class NoSonicPoint(SolverError):
    pass


class NoSupersonicRegion(SolverError):
    pass


class DegenerateRadialVelocity(SolverError):
    pass


class SingularMode(SolverError):
    pass


class NotElliptic(ValidationError):
    pass


class ZeroMeanViolation(ValidationError):
    pass


class VacuumState(SolverError):
    pass


class StepTooLarge(ValidationError):
    pass


class NoConvergence(SolverError):
    pass
