"""Exception hierarchy shared by the library, the CLI and the HTTP service.

InputError subclasses describe problems with what the user handed in and map
to exit code 1; InternalError marks a broken invariant and maps to exit code 2.
"""

from __future__ import annotations

from typing import List, Optional


class PolyencError(Exception):
    pass


class InputError(PolyencError, ValueError):
    pass


class TptpSyntaxError(InputError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class UnsupportedInput(InputError):
    def __init__(self, construct: str, detail: Optional[str] = None) -> None:
        text = f"unsupported construct: {construct}"
        if detail:
            text = f"{text} ({detail})"
        super().__init__(text)
        self.construct = construct


class TypingError(InputError):
    def __init__(self, errors: List[str]) -> None:
        head = errors[0] if errors else "ill-typed problem"
        more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
        super().__init__(head + more)
        self.errors = list(errors)


class LevelMismatch(InputError):
    pass


class InternalError(PolyencError, RuntimeError):
    pass
