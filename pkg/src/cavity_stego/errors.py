"""Exception hierarchy shared by every module of the simulator."""


class CavityStegoError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateQubit(CavityStegoError, ValueError):
    pass


class UnknownQubit(CavityStegoError, KeyError):
    pass


class ShapeError(CavityStegoError, ValueError):
    pass


class BadBasis(CavityStegoError, ValueError):
    pass


class BadParameter(CavityStegoError, ValueError):
    pass


class DerivationInconsistent(CavityStegoError, RuntimeError):
    """Brute-force table derivation produced overlapping or mixed supports."""


class NotACodeword(CavityStegoError, ValueError):
    pass


class NoValidPosition(CavityStegoError):
    """No index m satisfies the hiding consistency condition."""


class Abort(CavityStegoError):
    """An eavesdropping check exceeded the abort threshold."""

    def __init__(self, stage: str, error_rate: float):
        super().__init__(f"aborted at {stage}: error rate {error_rate:.4f}")
        self.stage = stage
        self.error_rate = error_rate


class BadProbe(CavityStegoError, ValueError):
    pass


class Unsupported(CavityStegoError, ValueError):
    pass


class ParseError(CavityStegoError, ValueError):
    pass
