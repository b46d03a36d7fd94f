"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid ship parameters or run configuration, detected at load time."""


class ParameterBoundsError(ValueError):
    """A gain/filter parameter vector lies outside its admissible box."""


class ControlSingularityError(RuntimeError):
    """The actuator-to-force map is too ill-conditioned to invert."""


class DivergenceError(RuntimeError):
    """Simulation state became non-finite or left the admissible region.

    ``step_index`` is the index of the integration step that produced the
    bad state, when the caller tracks one.
    """

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index
