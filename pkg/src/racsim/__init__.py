"""Trace-driven simulator for a random adaptive cache (decoupled tag
directory over a global data store with random frame eviction) and
baseline replacement policies."""

from .baselines import POLICIES, LruCache, RandomCache, VWayEngine, make_engine
from .config import AddressParts, BaselineConfig, Case4Mode, ConfigError, SimConfig, map_address
from .core import RacEngine, new_engine
from .metrics import Stats, StatsReport
from .oracle import oracle_replay
from .records import Access, AccessKind, AccessOutcome, FillCase
from .rng import SplitMix64
from .sim import run_policy, simulate

__all__ = [
    "POLICIES",
    "Access",
    "AccessKind",
    "AccessOutcome",
    "AddressParts",
    "BaselineConfig",
    "Case4Mode",
    "ConfigError",
    "FillCase",
    "LruCache",
    "RacEngine",
    "RandomCache",
    "SimConfig",
    "SplitMix64",
    "Stats",
    "StatsReport",
    "VWayEngine",
    "make_engine",
    "map_address",
    "new_engine",
    "oracle_replay",
    "run_policy",
    "simulate",
]
