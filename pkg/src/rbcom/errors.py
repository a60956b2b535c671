"""Exception hierarchy shared by the model, the simulator and the CLI."""


class RbcomError(Exception):
    """Base class for all errors raised by :mod:`rbcom`."""


class InvalidArgumentError(RbcomError, ValueError):
    pass


class UnstableResonatorError(RbcomError):
    """The resonator geometry has no confined Gaussian eigenmode."""


class SingularConfigurationError(RbcomError):
    """The geometry sits on a point where a closed-form expression is singular
    (e.g. the confocal-equivalent point g1* = 0)."""


class NoLinkError(RbcomError):
    """The pump power is below threshold, so no carrier reaches the receiver."""


class ConfigError(RbcomError):
    """A configuration file could not be parsed or validated."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.reason = message
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
