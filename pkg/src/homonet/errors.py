"""Exception types shared across the toolkit."""


class HomonetError(Exception):
    """Base class for all toolkit errors."""


class InputError(HomonetError, ValueError):
    """Invalid arguments, malformed files, or out-of-range parameters."""


class GenerationError(HomonetError, RuntimeError):
    """A generator reached a state it cannot sample from."""


class MetricError(HomonetError, ValueError):
    """A metric is undefined for the given graph or node set."""


class FitError(HomonetError, RuntimeError):
    """A distribution fit cannot be performed on the given data."""


class VerificationRefused(HomonetError, RuntimeError):
    """The input is too small for the requested statistical checks."""
