"""Drive a policy over an access stream and collect stats."""

from __future__ import annotations

from typing import Iterable

from .baselines import make_engine
from .config import BaselineConfig, SimConfig
from .metrics import Stats, StatsReport
from .oracle import oracle_steps
from .records import Access


def simulate(engine, accesses: Iterable[Access], warmup: int = 0) -> Stats:
    """Feed every access to ``engine``; the first ``warmup`` still change cache
    state but are left out of the counters."""
    stats = Stats()
    for i, acc in enumerate(accesses):
        outcome = engine.access(acc)
        if i >= warmup:
            stats.record(acc, outcome)
    return stats


def run_policy(
    policy: str,
    config: SimConfig,
    accesses: Iterable[Access],
    warmup: int = 0,
    trace: str = "",
    use_oracle: bool = False,
) -> StatsReport:
    if use_oracle:
        stats = Stats()
        accesses = list(accesses)
        for i, (outcome, _) in enumerate(oracle_steps(config, policy, accesses)):
            if i >= warmup:
                stats.record(accesses[i], outcome)
        engine_config = BaselineConfig.matching(config) if policy in ("lru", "random") else config
    else:
        engine = make_engine(policy, config)
        stats = simulate(engine, accesses, warmup)
        engine_config = engine.config
    echo = engine_config.as_dict()
    seed = echo.pop("seed")
    if policy in ("lru", "random"):
        echo = {k: echo[k] for k in ("num_sets", "ways", "block_size_bytes")}
    return stats.finalize(policy=policy, config=echo, seed=seed, trace=trace)
