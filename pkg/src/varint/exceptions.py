"""Exception types raised across the package."""


class UnsupportedStageCount(ValueError):
    pass


class ZeroWeight(ValueError):
    """A quadrature weight vanished, so the conjugate tableau cannot be formed."""


class DegenerateEndpoints(ValueError):
    pass


class StageCountTooSmall(ValueError):
    pass


class NonConvergence(RuntimeError):
    """Newton failed to reach the residual tolerance.

    The :class:`~varint.newton.SolveReport` of the failed solve is kept on
    ``report`` so callers can log it.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SingularJacobian(NonConvergence):
    pass


class OrderUnresolvable(RuntimeError):
    pass


class IntegrationFailed(NonConvergence):
    """A step of a trajectory failed; ``trajectory`` holds the steps before it."""

    def __init__(self, step, trajectory, report=None):
        super().__init__(f"solver failed at step {step}: {report}", report)
        self.step = step
        self.trajectory = trajectory
