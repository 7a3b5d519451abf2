from __future__ import annotations

import enum
from dataclasses import dataclass, field


class VerdictClass(str, enum.Enum):
    UNBOUNDED = "Unbounded"
    BOUNDED_NOT_COMPACT = "BoundedNotCompact"
    COMPACT = "Compact"
    INCONCLUSIVE = "Inconclusive"

    @property
    def bounded(self) -> bool:
        return self in (VerdictClass.BOUNDED_NOT_COMPACT, VerdictClass.COMPACT)


@dataclass(frozen=True)
class Verdict:
    """Classification of an operator plus the numbers that justify it."""

    cls: VerdictClass
    tag: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"class": self.cls.value, "tag": self.tag, "evidence": self.evidence}
