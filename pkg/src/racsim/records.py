"""Access records and per-access verdicts shared by every policy."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional


class AccessKind(str, enum.Enum):
    LOAD = "load"
    STORE = "store"


class FillCase(str, enum.Enum):
    NONE = "none"
    C1 = "c1"  # tag way free, frame free
    C2 = "c2"  # tag set full, frame free: LRU eviction
    C3 = "c3"  # tag way free, frames exhausted: global victim
    C4 = "c4"  # tag set full, frames exhausted


class Access(NamedTuple):
    kind: AccessKind
    address: int

    @classmethod
    def load(cls, address: int) -> "Access":
        return cls(AccessKind.LOAD, address)

    @classmethod
    def store(cls, address: int) -> "Access":
        return cls(AccessKind.STORE, address)


@dataclass(slots=True)
class AccessOutcome:
    hit: bool
    fill_case: FillCase = FillCase.NONE
    # (block_addr, was_dirty) per evicted block, in eviction order
    evicted: list[tuple[int, bool]] = field(default_factory=list)
    frame_used: Optional[int] = None
