"""Shared diagnostic records for the parser and validator."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import Span


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: Span
    code: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "code": self.code or "",
            "severity": self.severity.value,
            "message": self.message,
            "line": self.span.line,
            "column": self.span.column,
        }

    def render(self) -> str:
        code = f" [{self.code}]" if self.code else ""
        return f"{self.span.line}:{self.span.column}: {self.severity.value}{code}: {self.message}"
