"""Exception types shared across the package.

Everything user-facing derives from AnalogionError so the CLI can map
expected failures to exit code 1 and keep exit code 2 for genuine bugs.
"""

from __future__ import annotations


class AnalogionError(Exception):
    """Base class for all errors raised deliberately by this package."""


class EdgeFileError(AnalogionError):
    """Fatal defect in an edge file (bad header, duplicate statement id, ...)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownNodeError(AnalogionError):
    """A query named a node the store has never seen."""

    def __init__(self, ext: str):
        self.ext = ext
        super().__init__(f"unknown node: {ext}")


class CycleError(AnalogionError):
    """The subclass graph contains cycles and the policy forbids them."""

    def __init__(self, cycles):
        self.cycles = cycles
        rendered = "; ".join(" -> ".join(str(n) for n in cyc) for cyc in cycles)
        super().__init__(f"subclass graph contains {len(cycles)} cycle(s): {rendered}")


class UndefinedMetricError(AnalogionError):
    """A metric is not measurable for this input (e.g. empty parent class)."""


class ModeMismatchError(AnalogionError):
    """Metrics rows were computed under a different instance mode than requested."""


class BucketShortfallError(AnalogionError):
    """Not enough eligible pairs to fill a benchmark sampling bucket."""

    def __init__(self, bucket: str, needed: int, available: int):
        self.bucket = bucket
        self.needed = needed
        self.available = available
        super().__init__(
            f"bucket {bucket!r}: requested {needed} quads but only "
            f"{available} eligible pairs exist (short by {needed - available})"
        )


class EmbeddingFileError(AnalogionError):
    """Malformed embedding vector file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DatasetError(AnalogionError):
    """Malformed or inconsistent analogy dataset file."""


class NoScorableQuadsError(AnalogionError):
    """Every quad in the dataset was skipped, so nothing can be evaluated."""
