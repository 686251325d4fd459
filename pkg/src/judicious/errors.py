"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: bad file contents, out-of-range ids, violated preconditions."""


class GateExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured size limit."""
