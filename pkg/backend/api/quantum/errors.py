class ShadowCutError(ValueError):
    """Base class for every domain error raised by api.quantum."""


class SizeLimitError(ShadowCutError):
    """Register too large for the dense simulators."""


class CircuitError(ShadowCutError):
    pass


class CutError(ShadowCutError):
    pass


class PartitionError(ShadowCutError):
    pass


class EstimationError(ShadowCutError):
    pass
