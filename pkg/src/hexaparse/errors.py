"""Exception hierarchy shared across the toolkit."""


class HexaparseError(Exception):
    """Base class for all errors raised by this package."""


class ConlluParseError(HexaparseError):
    """Malformed CoNLL-U input; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TreeStructureError(HexaparseError):
    """A token list that does not form a valid single-rooted tree."""

    def __init__(self, message: str, sentence: int | None = None):
        self.sentence = sentence
        if sentence is not None:
            message = f"sentence {sentence}: {message}"
        super().__init__(message)


class NonProjectiveError(HexaparseError):
    """A tree with crossing arcs was handed to the encoder."""

    def __init__(self, message: str, arcs: tuple | None = None):
        self.arcs = arcs
        super().__init__(message)


class TagParseError(HexaparseError):
    """Unreadable tag text; carries the 1-based column offset in the line."""

    def __init__(self, message: str, column: int | None = None, line: int | None = None):
        self.column = column
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class InvalidTransitionError(HexaparseError):
    """A tag that cannot be applied at its position in the stack automaton."""

    def __init__(self, message: str, position: int, required_depth: int | None = None):
        self.position = position
        self.required_depth = required_depth
        super().__init__(f"position {position}: {message}")


class DecodeError(HexaparseError):
    """Decoding could not produce a valid tag sequence."""


class UnknownTagError(HexaparseError):
    """A tag is absent from the active vocabulary."""


class ShapeError(HexaparseError):
    """A score matrix with the wrong dimensions."""


class ModelFormatError(HexaparseError):
    """A model file that is corrupt or has an unsupported version."""


class AlignmentError(HexaparseError):
    """Gold and predicted corpora that do not line up token-by-token."""

    def __init__(self, message: str, sentence: int | None = None, token: int | None = None):
        self.sentence = sentence
        self.token = token
        where = []
        if sentence is not None:
            where.append(f"sentence {sentence}")
        if token is not None:
            where.append(f"token {token}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
