"""Exception hierarchy shared by all eptl modules."""


class EptlError(Exception):
    """Base class for every error raised by the toolkit."""


class ValidationError(EptlError):
    pass


class CycleError(ValidationError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("visibility relation is cyclic: " + " -> ".join(map(str, self.cycle)))


class UnknownIdError(ValidationError, KeyError):
    def __init__(self, event_id):
        self.event_id = event_id
        super().__init__(f"unknown event id {event_id!r}")

    def __str__(self):
        return self.args[0]


class DuplicateIdError(ValidationError):
    def __init__(self, event_id):
        self.event_id = event_id
        super().__init__(f"duplicate event id {event_id!r}")


class TooLargeError(EptlError):
    pass


class ParseError(EptlError):
    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = frozenset(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class UnboundVariableError(EptlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"variable {name!r} has no value in the interpretation")


class EmptyDomainError(EptlError):
    pass


class SchemaError(EptlError):
    pass


class ConfigError(EptlError):
    pass


class BoundError(EptlError):
    pass
