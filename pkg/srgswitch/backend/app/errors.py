"""
Domain errors. Everything the services raise derives from SrgSwitchError,
so the CLI and the routers can tell domain failures from usage errors.
"""


class SrgSwitchError(Exception):
    """Root of all domain errors."""


class DimensionError(SrgSwitchError, ValueError):
    pass


class InvalidGraphError(SrgSwitchError, ValueError):
    pass


class UnknownLabelError(SrgSwitchError, LookupError):
    def __str__(self) -> str:
        # LookupError would otherwise repr() the message
        return str(self.args[0]) if self.args else "unknown label"


class InvalidSwitchingSetError(SrgSwitchError, ValueError):
    pass


class OddSwitchingSetError(InvalidSwitchingSetError):
    pass


class ParameterRangeError(SrgSwitchError, ValueError):
    pass


class HadamardError(SrgSwitchError, ValueError):
    pass


class NotStronglyRegularError(SrgSwitchError, ValueError):
    pass


class Graph6Error(SrgSwitchError, ValueError):
    pass


class TranscriptError(SrgSwitchError, ValueError):
    pass


class PlanError(SrgSwitchError, ValueError):
    pass


class ReplayError(SrgSwitchError):
    """A transcript step could not be applied. `step` is 1-based."""

    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class RankMismatchError(ReplayError):
    def __init__(self, step: int, expected: int, observed: int):
        self.expected = expected
        self.observed = observed
        super().__init__(step, f"expected {expected}, observed {observed}")
