"""Exception hierarchy.

`InputError` subclasses are bad inputs (CLI exit code 2), `NumericError`
subclasses are numerical failures on valid inputs (exit code 3).
"""


class StatdistError(Exception):
    exit_code = 1


class InputError(StatdistError):
    exit_code = 2


class NumericError(StatdistError):
    exit_code = 3


class DomainError(InputError):
    def __init__(self, theta: float, lo: float, hi: float) -> None:
        self.theta = theta
        self.lo = lo
        self.hi = hi
        super().__init__(f"theta={theta!r} outside law domain [{lo!r}, {hi!r}]")


class TableError(InputError):
    """Malformed response-law table, `row` is 1-based and counts the header"""

    def __init__(self, path: str, row: int, reason: str) -> None:
        self.path = path
        self.row = row
        self.reason = reason
        super().__init__(f"{path}: row {row}: {reason}")


class DimensionError(InputError):
    def __init__(self, expected: int, got: int) -> None:
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch: expected {expected}, got {got}")


class CoverageError(InputError):
    def __init__(self, theta: float, lo: float, hi: float) -> None:
        self.theta = theta
        self.lo = lo
        self.hi = hi
        super().__init__(f"theta={theta!r} outside channel coverage ({lo!r}, {hi!r})")


class ConfigError(InputError):
    def __init__(self, key: str, reason: str = "") -> None:
        self.key = key
        self.reason = reason
        super().__init__(f"config {key}: {reason}")


class SingularityError(NumericError):
    def __init__(self, theta: float, reason: str = "") -> None:
        self.theta = theta
        self.reason = reason
        super().__init__(f"singular point at theta={theta!r}: {reason}")


class NonIdentifiableError(NumericError):
    def __init__(self, reason: str = "") -> None:
        self.reason = reason
        super().__init__(f"not identifiable: {reason}")


class UndecodableError(NumericError):
    def __init__(self, reason: str = "") -> None:
        self.reason = reason
        super().__init__(f"undecodable: {reason}")


class ClampError(NumericError):
    def __init__(self, value: float) -> None:
        self.value = value
        super().__init__(f"cosine {value!r} outside [-1, 1] beyond rounding tolerance")


class SegmentationError(NumericError):
    def __init__(self, segments: int) -> None:
        self.segments = segments
        super().__init__(f"{segments} monotone segments exceed the decomposition limit")


class BracketError(NumericError):
    def __init__(self, lo: float, hi: float) -> None:
        self.lo = lo
        self.hi = hi
        super().__init__(f"no sign change on [{lo!r}, {hi!r}]")
