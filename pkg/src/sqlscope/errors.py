"""Exception types shared across the engine."""


class SqlscopeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(SqlscopeError):
    """Invalid attribute schema (duplicate names, bad target, unknown kind/role)."""


class UnknownAttributeError(SqlscopeError):
    def __init__(self, name: str):
        super().__init__(f"unknown attribute: {name!r}")
        self.name = name


class KindMismatchError(SqlscopeError):
    """A cell value does not match its attribute's kind."""

    def __init__(self, row_index: int, attribute: str, message: str):
        super().__init__(f"row {row_index}, attribute {attribute!r}: {message}")
        self.row_index = row_index
        self.attribute = attribute


class MeasureError(SqlscopeError):
    """The measure cannot be constructed for this table/target."""


class MeasureUndefinedError(MeasureError):
    """The measure is undefined on this extent (e.g. an empty KS side)."""


class ConfigError(SqlscopeError):
    """One or more invalid configuration fields, collected before running."""

    def __init__(self, messages: list[str]):
        super().__init__("; ".join(messages))
        self.messages = list(messages)


class IngestError(SqlscopeError):
    """A workload line could not be ingested (strict mode or duplicate id)."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
