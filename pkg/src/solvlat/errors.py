"""Exception hierarchy shared by all solvlat modules.

Every error carries a stable ``code`` (used verbatim in CLI error JSON) and a
``details`` dict with whatever structured context the raising site has.
"""

from __future__ import annotations

from typing import Any


class SolvlatError(Exception):
    code = "Error"

    def __init__(self, message: str = "", **details: Any) -> None:
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details

    def __str__(self) -> str:
        if self.details:
            extra = ", ".join(f"{k}={v!r}" for k, v in self.details.items())
            return f"{self.message} ({extra})"
        return self.message


class ParseError(SolvlatError):
    code = "ParseError"


# -- exact arithmetic ---------------------------------------------------------

class MixedField(SolvlatError):
    code = "MixedField"


class Singular(SolvlatError):
    code = "Singular"


class RankDeficient(SolvlatError):
    code = "RankDeficient"

    def __init__(self, message: str = "", rank: int = 0, **details: Any) -> None:
        super().__init__(message, rank=rank, **details)
        self.rank = rank


class RepeatedEigenvalue(SolvlatError):
    code = "RepeatedEigenvalue"


class NonRealSpectrum(SolvlatError):
    code = "NonRealSpectrum"


# -- diagonal system validation ----------------------------------------------

class InvalidDiagSystem(SolvlatError):
    """Aggregates every violated constraint of a candidate diagonal system."""

    code = "InvalidDiagSystem"

    def __init__(self, violations: list["SolvlatError"]) -> None:
        codes = [v.code for v in violations]
        super().__init__("invalid diagonal system: " + ", ".join(codes))
        self.violations = violations
        self.codes = codes


class NotTraceless(SolvlatError):
    code = "NotTraceless"


class ZeroEntry(SolvlatError):
    code = "ZeroEntry"


class RepeatedEntryInColumn(SolvlatError):
    code = "RepeatedEntryInColumn"


class RankDeficientOmega(SolvlatError):
    code = "RankDeficientOmega"


class BadShape(SolvlatError):
    code = "BadShape"


# -- compatible pairs and lattices ---------------------------------------------

class NotNearInteger(SolvlatError):
    code = "NotNearInteger"


class DetNotOne(SolvlatError):
    code = "DetNotOne"


class NonCommuting(SolvlatError):
    code = "NonCommuting"


class NotInteger(SolvlatError):
    code = "NotInteger"


class Overflow(SolvlatError):
    code = "Overflow"


# -- classification -------------------------------------------------------------

class TooLarge(SolvlatError):
    code = "TooLarge"


class InvalidTau(SolvlatError):
    code = "InvalidTau"


class ZeroScale(SolvlatError):
    code = "ZeroScale"


class InvalidShear(SolvlatError):
    code = "InvalidShear"


class InexactInput(SolvlatError):
    code = "InexactInput"


class NotCommensurable(SolvlatError):
    code = "NotCommensurable"


# -- pair factory ----------------------------------------------------------------

class NotCommuting(SolvlatError):
    code = "NotCommuting"


class NonPositiveSpectrum(SolvlatError):
    code = "NonPositiveSpectrum"


class EigenvalueOne(SolvlatError):
    code = "EigenvalueOne"


class SharedEigenbasisFailure(SolvlatError):
    code = "SharedEigenbasisFailure"


class NotHyperbolic(SolvlatError):
    code = "NotHyperbolic"


class Degenerate(SolvlatError):
    code = "Degenerate"
