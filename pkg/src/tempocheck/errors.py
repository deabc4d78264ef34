"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TempocheckError(Exception):
    """Base class for all errors raised by this package."""


class SourcePosition:
    """Line/column pair, 1-based, attached to language diagnostics."""

    __slots__ = ("line", "column")

    def __init__(self, line: int, column: int):
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"

    def __repr__(self) -> str:
        return f"SourcePosition({self.line}, {self.column})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SourcePosition)
            and (self.line, self.column) == (other.line, other.column)
        )


class ConstraintLanguageError(TempocheckError):
    """Any diagnostic produced while lexing, parsing, or checking a constraint."""

    def __init__(self, message: str, position: SourcePosition | None = None):
        self.position = position
        if position is not None:
            message = f"{position}: {message}"
        super().__init__(message)


class ParseError(ConstraintLanguageError):
    """Malformed constraint text; carries the position and what was expected."""


class ArityError(ConstraintLanguageError):
    """Temporal operator or builtin applied with the wrong number of arguments."""


class UnknownTypeError(ConstraintLanguageError):
    """Constraint context or ref target names a type absent from the schema."""


class UnknownPropertyError(ConstraintLanguageError):
    """Navigation names a property the schema does not declare for the type."""


class TypeCheckError(ConstraintLanguageError):
    """Expression is ill-typed (operand kinds, non-Boolean temporal child, ...)."""


class SchemaError(TempocheckError):
    """Schema definition is internally inconsistent."""


class ModelError(TempocheckError):
    """Base class for artifact-graph errors."""


class UnknownArtifactError(ModelError):
    """Change or read addresses an artifact id not present in the graph."""


class StaleSequenceError(ModelError):
    """Change set sequence number does not advance the applied sequence."""


class ChangeSetError(ModelError):
    """Change set is malformed: type mismatch, duplicate target, bad op."""


class UnknownPatternError(TempocheckError):
    """Pattern name is not in the library (or excluded by verbatim-only mode)."""


class EvaluationError(TempocheckError):
    """Unrecoverable evaluation failure (internal; soft errors go on the verdict)."""
