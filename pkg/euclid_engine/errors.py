"""Exception types shared by the engine modules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence


class EngineError(RuntimeError):
    """Base class for every error raised by `euclid_engine`."""


class ZeroInverseError(EngineError, ZeroDivisionError):
    def __init__(self) -> None:
        super().__init__("zero inverse")


class AlgebraValidationError(EngineError, ValueError):
    """Raised when structure constants or a defining polynomial are rejected.

    `witness` holds the basis triple (or polynomial gcd) that shows the failure.
    """

    def __init__(self, reason: str, witness: Optional[Sequence[Any]] = None) -> None:
        self.reason = reason
        self.witness = tuple(witness) if witness is not None else None
        detail = reason if self.witness is None else f"{reason} (witness {list(self.witness)})"
        super().__init__(detail)


class NotInvertibleError(EngineError, ValueError):
    def __init__(self, detail: str = "not invertible") -> None:
        super().__init__(detail)


class RetryBudgetExhausted(EngineError):
    """A randomized sampler ran out of attempts."""

    def __init__(self, stage: str, attempts: int) -> None:
        self.stage = stage
        self.attempts = attempts
        super().__init__(f"retry budget exhausted at {stage} after {attempts} attempts")


class DimensionConstraintError(EngineError, ValueError):
    def __init__(self, n: int, r: int, s: int, u: int) -> None:
        self.dims = (n, r, s, u)
        super().__init__(
            f"dimension constraints violated: need n >= ru+s and n >= su+r, got n={n} r={r} s={s} u={u}"
        )


class SideMismatchError(EngineError, ValueError):
    def __init__(self, left: str, right: str) -> None:
        super().__init__(f"side mismatch: {left} vs {right}")


@dataclass(frozen=True)
class DomainViolation:
    """A rational map was evaluated outside its domain of definition.

    `condition` is "a" (product dimension dropped), "b" (intersection dimension
    wrong) or "c" (image left the open locus of the target).
    """

    condition: str
    detail: str
    step: Optional[int] = None

    def at_step(self, step: int) -> "DomainViolation":
        return DomainViolation(self.condition, self.detail, step)

    def to_json(self) -> Dict[str, Any]:
        return {"condition": self.condition, "detail": self.detail, "step": self.step}


class OutsideDomainError(EngineError):
    def __init__(self, violation: DomainViolation) -> None:
        self.violation = violation
        where = "" if violation.step is None else f" at step {violation.step}"
        super().__init__(f"outside domain of definition{where}: condition {violation.condition} ({violation.detail})")


class InstanceTooLargeError(EngineError, ValueError):
    pass


class ChainConsistencyError(EngineError):
    """The parity-driven alternation disagrees with the Euclid division data."""
