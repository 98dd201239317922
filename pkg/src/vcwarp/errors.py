"""Exception hierarchy shared by every vcwarp module.

Each error carries a ``code`` used by the command line frontend: 3 for bad
input, 4 for numerical failures.
"""


class VcwarpError(Exception):
    code = 3


class MalformedWav(VcwarpError):
    pass


class UnsupportedEncoding(VcwarpError):
    pass


class BadMagic(VcwarpError):
    pass


class TruncatedFile(VcwarpError):
    pass


class DimMismatch(VcwarpError, ValueError):
    pass


class SignalTooShort(VcwarpError, ValueError):
    pass


class EmptySequence(VcwarpError, ValueError):
    pass


class ConfigMismatch(VcwarpError, ValueError):
    pass


class WarpOutOfRange(VcwarpError, ValueError):
    pass


class DegenerateDenominator(VcwarpError, ArithmeticError):
    code = 4


class NonFiniteCost(VcwarpError, ArithmeticError):
    code = 4
