"""Exception hierarchy for the benchmark harness.

Every failure mode exposed by the public API maps to one class here, so
callers can distinguish data problems (reject the run) from per-model
failures (record and continue).
"""


class BenchmarkError(Exception):
    """Base class for all harness errors."""


# --- ingestion / canonical data ---------------------------------------------


class FileUnreadable(BenchmarkError):
    pass


class MalformedRow(BenchmarkError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyInput(BenchmarkError):
    pass


class GapTooLarge(BenchmarkError):
    pass


class NonContiguous(BenchmarkError):
    pass


class FormatViolation(BenchmarkError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OutOfRange(BenchmarkError):
    pass


# --- transforms --------------------------------------------------------------


class TooFewSamples(BenchmarkError):
    pass


class DegenerateDistribution(BenchmarkError):
    pass


# --- forecasters -------------------------------------------------------------


class EmptyContext(BenchmarkError):
    pass


class ContextTooShort(BenchmarkError):
    pass


class SeriesTooShort(BenchmarkError):
    pass


class InvalidWindow(BenchmarkError):
    pass


class OptimizationFailed(BenchmarkError):
    pass


class TooShort(BenchmarkError):
    pass


class DidNotConverge(BenchmarkError):
    pass


# --- external adapter --------------------------------------------------------


class AdapterError(BenchmarkError):
    """Fatal adapter failure: aborts the model's whole run."""


class SpawnFailed(AdapterError):
    pass


class HandshakeFailed(AdapterError):
    pass


class ProtocolError(AdapterError):
    pass


class Timeout(AdapterError):
    pass


class ChildCrashed(AdapterError):
    pass


class ForecastFailed(BenchmarkError):
    """Per-request failure reported by a healthy child; only that
    (model, day) pair is lost."""


# --- evaluation --------------------------------------------------------------


class DuplicateDay(BenchmarkError):
    pass


class MissingDay(BenchmarkError):
    pass


class DegenerateLosses(BenchmarkError):
    pass


class LengthMismatch(BenchmarkError):
    pass


class DateMisaligned(BenchmarkError):
    pass
