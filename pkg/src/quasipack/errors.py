"""Exception hierarchy shared by all quasipack modules."""


class QuasipackError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameters(QuasipackError, ValueError):
    pass


class ParseError(QuasipackError, ValueError):
    """Malformed text input. ``line`` is 1-based, or None when unknown."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(QuasipackError):
    """A search hit its node cap before reaching a verdict.

    Never a proof of nonexistence; callers must treat it as "undetermined".
    """

    def __init__(self, message, nodes=None):
        self.nodes = nodes
        super().__init__(message)


class CapExceeded(QuasipackError):
    """An exhaustive enumeration would exceed its cap."""

    def __init__(self, required, cap):
        self.required = required
        self.cap = cap
        super().__init__(f"enumeration needs {required} items, cap is {cap}")


class InsufficientAbsorbers(QuasipackError):
    pass


class PackingFailure(QuasipackError):
    """A stage of the absorbing pipeline failed.

    ``stage`` is one of "divisibility", "family", "greedy", "absorb".
    """

    def __init__(self, stage, message, diagnostics=None):
        self.stage = stage
        self.diagnostics = dict(diagnostics or {})
        super().__init__(f"[{stage}] {message}")
