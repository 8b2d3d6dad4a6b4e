class RegimeError(ValueError):
    """Parameters fall outside the regime the codes and decoders support."""


class FormatError(ValueError):
    """A serialized object (header, polynomial, codeword file) is malformed."""


class SolverError(RuntimeError):
    """An internal invariant of a decoding stage failed."""
