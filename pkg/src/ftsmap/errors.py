"""Exception hierarchy shared by all modules."""


class FtsError(Exception):
    """Base class for every error raised by this package."""


class InputError(FtsError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(FtsError, ValueError):
    """Data has no usable variation (constant series, point outside all supports...)."""


class MissingRepresentativeError(FtsError, LookupError):
    """No sample in the training series carries the requested fuzzy label."""


class EmptyForecastError(FtsError, ValueError):
    """A fuzzy forecast vector is identically zero and cannot be defuzzified."""


class FitError(FtsError, RuntimeError):
    """A model could not be estimated from the given data."""
