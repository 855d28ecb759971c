"""Exception types raised by the simulation engine."""


class TempoloopError(Exception):
    """Base class for all engine errors.

    ``context`` collects where the failure happened (variant, P, k, interval)
    as the error propagates outwards; it is appended to the message.
    """

    context = None

    def add_context(self, **kw):
        ctx = dict(self.context or {})
        for key, value in kw.items():
            ctx.setdefault(key, value)
        self.context = ctx
        return self

    def __str__(self):
        msg = super().__str__()
        if self.context:
            msg += " [" + ", ".join(f"{k}={v}" for k, v in self.context.items()) + "]"
        return msg


class DomainError(TempoloopError, ValueError):
    """An argument lies outside the admissible domain of a model function."""


class LumenClosureError(TempoloopError):
    """The foam cell concentration reached 1, where the surrogate channel closes."""

    def __init__(self, c_s, where=""):
        self.c_s = c_s
        msg = f"lumen closure: c_s={c_s!r} >= 1"
        if where:
            msg = f"{msg} ({where})"
        super().__init__(msg)


class NonConvergenceError(TempoloopError):
    """An iteration hit its cap before meeting its tolerance."""

    def __init__(self, message, *, c_s=None, residual=None):
        self.c_s = c_s
        self.residual = residual
        super().__init__(message)


class ConfigError(TempoloopError, ValueError):
    """Invalid or unknown configuration entries."""
