"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can map it to
structured output without string matching.
"""

from __future__ import annotations


class MultifaultError(Exception):
    code = "error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context


class CyclicInput(MultifaultError):
    code = "cyclic-input"


class OverlappingSets(MultifaultError):
    code = "overlapping-sets"


class InvalidNetwork(MultifaultError):
    """A precondition validation failed; ``report`` holds the findings."""

    code = "invalid-network"

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class CyclicGlobal(MultifaultError):
    code = "cyclic-global"


class UnderdeterminedCpt(MultifaultError):
    code = "underdetermined-cpt"


class InconsistentAssessment(MultifaultError):
    code = "inconsistent-assessment"


class ScopeMismatch(MultifaultError):
    code = "scope-mismatch"


class NotPositive(MultifaultError):
    code = "not-positive"


class CausalError(MultifaultError):
    """Base for noisy-OR parameter errors.

    ``row`` is set when the failure is tied to one Cpt row during synthesis.
    """

    code = "causal-error"

    def __init__(self, message: str, row=None, **context):
        super().__init__(message, **context)
        self.row = row


class DegenerateLeak(CausalError):
    code = "degenerate-leak"


class NegativeCausalPower(CausalError):
    code = "negative-causal-power"


class NonBinaryManifestation(MultifaultError):
    code = "non-binary-manifestation"


class FaultHasParents(MultifaultError):
    code = "fault-has-parents"


class UnknownInstance(MultifaultError):
    code = "unknown-instance"


class NoNormalInstance(MultifaultError):
    code = "no-normal-instance"


class MissingPrior(MultifaultError):
    code = "missing-prior"


class NameCollision(MultifaultError):
    code = "name-collision"


class TooLarge(MultifaultError):
    code = "too-large"


class ZeroEvidence(MultifaultError):
    code = "zero-evidence"


class DocumentError(MultifaultError):
    """Base for problems reading a network document."""

    code = "document-error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.path = path

    def location(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}"
        if self.path:
            return self.path
        return ""


class ParseError(DocumentError):
    code = "parse-error"


class SchemaError(DocumentError):
    code = "schema-error"


class VersionError(DocumentError):
    code = "version-error"
