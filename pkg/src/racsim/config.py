"""Cache geometry, policy configuration and address decomposition."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple

from .rng import MASK64


class ConfigError(ValueError):
    pass


class Case4Mode(str, enum.Enum):
    """How a miss is handled when both the tag set and the data store are full.

    REUSE evicts the set's LRU entry and hands its frame to the new block.
    LITERAL evicts the LRU entry *and* a random frame, so occupancy drops
    by one line.
    """

    REUSE = "reuse"
    LITERAL = "literal"


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _check_geometry(num_sets: int, block_size_bytes: int, seed: int) -> None:
    if not _is_pow2(num_sets):
        raise ConfigError(f"num_sets must be a power of two, got {num_sets}")
    if not _is_pow2(block_size_bytes):
        raise ConfigError(f"block_size_bytes must be a power of two, got {block_size_bytes}")
    if not 0 <= seed <= MASK64:
        raise ConfigError(f"seed must fit in 64 unsigned bits, got {seed}")


@dataclass(frozen=True)
class SimConfig:
    """Geometry of the decoupled cache: per-set tag directory plus a global frame pool."""

    num_sets: int = 2048
    tag_ways: int = 32
    data_ways: int = 16
    block_size_bytes: int = 64
    seed: int = 0
    case4_mode: Case4Mode = Case4Mode.REUSE

    def __post_init__(self):
        _check_geometry(self.num_sets, self.block_size_bytes, self.seed)
        if self.tag_ways < 1:
            raise ConfigError(f"tag_ways must be >= 1, got {self.tag_ways}")
        if self.data_ways < 1:
            raise ConfigError(f"data_ways must be >= 1, got {self.data_ways}")
        try:
            object.__setattr__(self, "case4_mode", Case4Mode(self.case4_mode))
        except ValueError:
            raise ConfigError(f"unknown case4 mode {self.case4_mode!r}") from None

    @property
    def total_frames(self) -> int:
        return self.num_sets * self.data_ways

    @property
    def tdr(self) -> Fraction:
        """Tag-to-data ratio."""
        return Fraction(self.num_sets * self.tag_ways, self.total_frames)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["case4_mode"] = self.case4_mode.value
        return d


@dataclass(frozen=True)
class BaselineConfig:
    """Conventional set-associative geometry for the LRU and random baselines.

    Defaults give the same data capacity as the default SimConfig.
    """

    num_sets: int = 2048
    ways: int = 16
    block_size_bytes: int = 64
    seed: int = 0

    def __post_init__(self):
        _check_geometry(self.num_sets, self.block_size_bytes, self.seed)
        if self.ways < 1:
            raise ConfigError(f"ways must be >= 1, got {self.ways}")

    @classmethod
    def matching(cls, config: SimConfig) -> "BaselineConfig":
        return cls(config.num_sets, config.data_ways, config.block_size_bytes, config.seed)

    def as_dict(self) -> dict:
        return asdict(self)


class AddressParts(NamedTuple):
    block_addr: int
    set_index: int
    tag: int


def map_address(config: SimConfig | BaselineConfig, address: int) -> AddressParts:
    block_addr = address // config.block_size_bytes
    return AddressParts(block_addr, block_addr % config.num_sets, block_addr // config.num_sets)
