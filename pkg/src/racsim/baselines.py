"""Comparison policies: set-associative LRU, set-associative random, and
V-Way style global reuse replacement over the decoupled tag/data layout."""

from __future__ import annotations

from .config import BaselineConfig, SimConfig, map_address
from .core import DataFrame, RacEngine
from .records import Access, AccessKind, AccessOutcome, FillCase
from .rng import SplitMix64

REUSE_CTR_MAX = 3


class VWayEngine(RacEngine):
    """Decoupled cache whose global victim comes from a reuse-counter scan.

    Hits bump a 2-bit saturating counter on the frame.  When a global victim
    is needed, a cursor sweeps the frames circularly, decrementing nonzero
    counters until it meets a frame whose counter is zero.
    """

    policy_name = "vway"

    def __init__(self, config: SimConfig):
        super().__init__(config)
        self.ptr = 0

    def _on_hit(self, frame: DataFrame) -> None:
        if frame.reuse_ctr < REUSE_CTR_MAX:
            frame.reuse_ctr += 1

    def _choose_victim_frame(self) -> int:
        frames = self.frames
        n = len(frames)
        i = self.ptr
        # each lap decrements every nonzero counter, so this ends within 4 laps
        for _ in range((REUSE_CTR_MAX + 1) * n + 1):
            frame = frames[i]
            if frame.valid:
                if frame.reuse_ctr == 0:
                    self.ptr = (i + 1) % n
                    return i
                frame.reuse_ctr -= 1
            i = (i + 1) % n
        raise RuntimeError("reuse scan found no valid frame")


class _SetAssociative:
    """Conventional cache: each block lives in one of ``ways`` slots of its set."""

    policy_name = ""

    def __init__(self, config: BaselineConfig):
        self.config = config
        n = config.num_sets * config.ways
        self.tags: list[list] = [[None] * config.ways for _ in range(config.num_sets)]
        self.dirty = [False] * n
        self.index: list[dict[int, int]] = [{} for _ in range(config.num_sets)]
        self.rng = SplitMix64(config.seed)

    def _touch(self, set_index: int, way: int) -> None:
        pass

    def _forget(self, set_index: int, way: int) -> None:
        pass

    def _victim_way(self, set_index: int) -> int:
        raise NotImplementedError

    def access(self, access: Access) -> AccessOutcome:
        cfg = self.config
        _, set_index, tag = map_address(cfg, access.address)
        is_store = access.kind is AccessKind.STORE
        index = self.index[set_index]
        base = set_index * cfg.ways

        way = index.get(tag)
        if way is not None:
            self._touch(set_index, way)
            if is_store:
                self.dirty[base + way] = True
            return AccessOutcome(True, frame_used=base + way)

        evicted = []
        tags = self.tags[set_index]
        if len(index) < cfg.ways:
            case = FillCase.C1
            way = tags.index(None)
        else:
            case = FillCase.C2
            way = self._victim_way(set_index)
            old = tags[way]
            evicted.append((old * cfg.num_sets + set_index, self.dirty[base + way]))
            del index[old]
            self._forget(set_index, way)
        tags[way] = tag
        index[tag] = way
        self.dirty[base + way] = is_store
        self._touch(set_index, way)
        return AccessOutcome(False, case, evicted, base + way)

    def check_invariants(self) -> list[str]:
        problems = []
        for s, tags in enumerate(self.tags):
            valid = [t for t in tags if t is not None]
            if len(valid) != len(set(valid)):
                problems.append(f"I8 uniqueness: set {s} holds a duplicate tag")
            if self.index[s] != {t: w for w, t in enumerate(tags) if t is not None}:
                problems.append(f"I3 recency: set {s} tag index out of sync")
        return problems


class LruCache(_SetAssociative):
    policy_name = "lru"

    def __init__(self, config: BaselineConfig):
        super().__init__(config)
        self.recency: list[list[int]] = [[] for _ in range(config.num_sets)]

    def _touch(self, set_index, way):
        order = self.recency[set_index]
        if order and order[0] == way:
            return
        if way in order:
            order.remove(way)
        order.insert(0, way)

    def _forget(self, set_index, way):
        self.recency[set_index].remove(way)

    def _victim_way(self, set_index):
        return self.recency[set_index][-1]

    def check_invariants(self) -> list[str]:
        problems = super().check_invariants()
        for s, tags in enumerate(self.tags):
            valid_ways = [w for w, t in enumerate(tags) if t is not None]
            if sorted(self.recency[s]) != valid_ways:
                problems.append(f"I3 recency: set {s} recency {self.recency[s]} != valid ways {valid_ways}")
        return problems


class RandomCache(_SetAssociative):
    policy_name = "random"

    def _victim_way(self, set_index):
        return self.rng.next_u64() % self.config.ways


POLICIES = ("rac", "lru", "random", "vway")


def make_engine(policy: str, config: SimConfig):
    """Build a policy engine; set-associative baselines get ``config``'s data capacity."""
    if policy == "rac":
        return RacEngine(config)
    if policy == "vway":
        return VWayEngine(config)
    if policy == "lru":
        return LruCache(BaselineConfig.matching(config))
    if policy == "random":
        return RandomCache(BaselineConfig.matching(config))
    raise ValueError(f"unknown policy {policy!r}; expected one of {', '.join(POLICIES)}")
