"""Exception hierarchy shared across the toolkit."""


class PtSpectraError(Exception):
    """Base class for all toolkit errors."""


class InvalidBasisError(PtSpectraError, ValueError):
    """A basis specification is malformed or incompatible with an operation."""


class BracketError(PtSpectraError, ValueError):
    """A bisection bracket does not straddle a phase transition."""


class DslError(PtSpectraError):
    """Base class for expression-language errors.

    Carries ``span``, a ``(start, end)`` pair of character offsets into the
    source text.
    """

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} (at {span[0]}..{span[1]})")
        self.span = span


class DslLexicalError(DslError):
    """An input character cannot start any token."""


class DslSyntaxError(DslError):
    """Token stream does not match the expression grammar."""


class DslUnknownSymbolError(DslError):
    """A position/momentum symbol refers to a mode outside the declared count."""


class DslOperatorDivisionError(DslError):
    """Division by a subexpression that contains an operator symbol."""


class DslExponentError(DslError):
    """Exponent of ``^`` is not a positive integer literal."""


class DslBindingError(PtSpectraError, KeyError):
    """A named parameter was left unbound at compile time."""

    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(f"unbound parameter(s): {', '.join(self.names)}")
