"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class EvalError(ArithmeticError):
    """Evaluating a user function produced an undefined or non-finite value."""


class ExprSyntaxError(ValueError):
    """An expression string could not be parsed.

    Attributes:
        position: byte offset of the offending token.
        expected: description of the token class the parser wanted.
    """

    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        msg = f"at offset {position}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class InputError(ValueError):
    """A run configuration or parameter set failed validation."""
