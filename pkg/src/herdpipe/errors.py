"""Exception types raised across the pipeline."""


class PipelineError(Exception):
    """Base class for all herdpipe errors."""


class ConfigError(PipelineError):
    """Bad configuration value, unknown key, or invalid flag combination."""


# --- ingest ---------------------------------------------------------------

class MalformedRow(PipelineError):
    def __init__(self, line: int, detail: str = ""):
        self.line = line
        super().__init__(f"malformed row at line {line}" + (f": {detail}" if detail else ""))


class NonMonotonicTimestamp(PipelineError):
    pass


class EmptyFile(PipelineError):
    pass


class OverlappingSegments(PipelineError):
    def __init__(self, first: int, second: int):
        self.pair = (first, second)
        super().__init__(f"label segments {first} and {second} overlap")


class UnknownBehavior(PipelineError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown behavior token {token!r}")


# --- synth ----------------------------------------------------------------

class InvalidSchedule(PipelineError):
    pass


# --- features -------------------------------------------------------------

class EmptySeries(PipelineError):
    pass


class BlockTooShort(PipelineError):
    pass


# --- classify -------------------------------------------------------------

class EmptyDataset(PipelineError):
    pass


class SchemaMismatch(PipelineError):
    pass


class VersionMismatch(PipelineError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(f"model file version {found!r}, expected {expected!r}")


class CorruptModel(PipelineError):
    pass


# --- estrus ---------------------------------------------------------------

class EmptyFit(PipelineError):
    pass


class InsufficientHistory(PipelineError):
    pass


class ShapeMismatch(PipelineError):
    pass


class DivergedLoss(PipelineError):
    pass


class ZeroDenominator(PipelineError):
    pass


# --- cli ------------------------------------------------------------------

class CalendarMismatch(PipelineError):
    pass
