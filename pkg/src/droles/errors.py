"""Exception hierarchy shared by the checker, evaluator and front end."""

from __future__ import annotations


class DRError(Exception):
    """Base class for every diagnostic raised by this package."""


class ParseError(DRError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str | None = None):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{source}:{where}{message}" if source else f"{where}{message}")
        self.line = line
        self.col = col
        self.message = message
        self.source = source


class RoleError(DRError):
    def __init__(self, where: str, need, have, detail: str = ""):
        msg = f"role error at {where}: needs role {need}, has {have}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.where = where
        self.need = need
        self.have = have


class PatternArityError(DRError):
    pass


class PatternShapeError(DRError):
    pass


class FuelExhausted(DRError):
    """Normalisation budget ran out; the verdict is unknown."""


class CapExceeded(DRError):
    pass


class TypingError(DRError):
    """Base of typing failures."""


class TypeMismatch(TypingError):
    def __init__(self, expected, got, detail: str = ""):
        from .concrete import show

        msg = f"type mismatch: expected {show(expected)}, got {show(got)}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.expected = expected
        self.got = got


class FlagMismatch(TypingError):
    pass


class IrrelVarEscape(TypingError):
    pass


class NotAFunction(TypingError):
    pass


class NotACoercionFunction(TypingError):
    pass


class UnknownName(TypingError):
    pass


class UnsaturatedCase(TypingError):
    pass


class HeadNotConstant(TypingError):
    pass


class BranchShapeError(TypingError):
    pass


class EqualityUnknown(TypingError):
    pass


class KindError(TypingError):
    pass


class BoxMisuse(TypingError):
    pass


class DuplicateName(DRError):
    pass


class RoleListMismatch(DRError):
    pass


class MissingAnnotation(TypingError):
    pass


class CoercionUnprovable(TypingError):
    pass
