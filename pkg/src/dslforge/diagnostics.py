"""Diagnostics shared by the grammar compiler and the instance engine.

Every problem found while compiling a grammar or running an example is
reported as a :class:`Diagnostic` carrying an :class:`ErrorCategory`.
Categories (not message strings) are the stable contract: messages are
worded by this tool, categories drive repair statistics and histograms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class ErrorCategory(str, Enum):
    SYNTAX = "syntax"                 # missing, mismatched, or invalid symbols
    LINKING = "linking"               # non-resolvable references to rules/enums
    TRANSFORMATION = "transformation" # wrongly used types or rules
    INVALID_STATE = "invalid_state"   # whole-grammar defects (dup rule, no entry, ...)
    OTHER = "other"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    category: ErrorCategory
    message: str
    line: int = 1
    column: int = 1
    offending: str | None = None
    severity: Severity = Severity.ERROR

    def render(self) -> str:
        """One-line human/LLM-facing rendering: category, position, message."""
        head = {
            ErrorCategory.SYNTAX: "Syntax error",
            ErrorCategory.LINKING: "Linking error",
            ErrorCategory.TRANSFORMATION: "Transformation error",
            ErrorCategory.INVALID_STATE: "Invalid state error",
            ErrorCategory.OTHER: "Warning" if self.severity is Severity.WARNING else "Error",
        }[self.category]
        text = f"{head} at {self.line}:{self.column}: {self.message}"
        if self.offending:
            text += f" (near '{self.offending}')"
        return text

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "severity": self.severity.value,
            "message": self.message,
            "line": self.line,
            "column": self.column,
            "offending": self.offending,
        }


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    """True if any diagnostic is error-severity (warnings alone keep a grammar valid)."""
    return any(d.severity is Severity.ERROR for d in diagnostics)


# Patterns consulted in order; the first hit wins.  Rendered diagnostics from
# this tool lead with the category name, so they classify back exactly.
_CATEGORY_WORDS = [
    (re.compile(r"\bsyntax\b", re.I), ErrorCategory.SYNTAX),
    (re.compile(r"\blinking\b", re.I), ErrorCategory.LINKING),
    (re.compile(r"\btransformation\b", re.I), ErrorCategory.TRANSFORMATION),
    (re.compile(r"\binvalid.state\b", re.I), ErrorCategory.INVALID_STATE),
]

_MESSAGE_PATTERNS = [
    (re.compile(r"non.resolvable|unresolved|cannot resolve|cross.reference", re.I),
     ErrorCategory.LINKING),
    (re.compile(r"duplicat|missing start|no parser rule|left.recursi|missing entry", re.I),
     ErrorCategory.INVALID_STATE),
    (re.compile(r"conflicting|wrongly used|non.keyword|boolean assignment", re.I),
     ErrorCategory.TRANSFORMATION),
    (re.compile(r"missing|mismatch|invalid symbol|unexpected|unterminated|expected", re.I),
     ErrorCategory.SYNTAX),
]


def classify_error(message: str, phase: str) -> ErrorCategory:
    """Map an error message plus its origin phase to a category.

    ``phase`` is one of ``parse``, ``validate``, ``instance-run``.  The
    mapping is total and deterministic; unknown origins fall back to OTHER.
    """
    if not message:
        return ErrorCategory.OTHER
    for pat, cat in _CATEGORY_WORDS:
        if pat.search(message):
            return cat
    if phase == "parse":
        return ErrorCategory.SYNTAX
    for pat, cat in _MESSAGE_PATTERNS:
        if pat.search(message):
            return cat
    return ErrorCategory.OTHER
