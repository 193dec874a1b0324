"""Random adaptive cache engine.

A per-set tag directory (``tag_ways`` entries per set, LRU ordered) sits in
front of a single global pool of ``num_sets * data_ways`` data frames.  Tag
entries point forward at frames and frames point back at their owning tag
entry, so any set may claim any frame.  When the pool is exhausted a victim
frame is drawn uniformly at random from all valid frames.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

from .config import Case4Mode, SimConfig
from .records import Access, AccessKind, AccessOutcome, FillCase
from .rng import SplitMix64

# (delta valid tags, delta valid frames) per access, keyed by fill case
# and, for c4, by Case4Mode.
OCCUPANCY_DELTAS = {
    FillCase.NONE: (0, 0),
    FillCase.C1: (1, 1),
    FillCase.C2: (0, 0),
    FillCase.C3: (0, 0),
    (FillCase.C4, Case4Mode.REUSE): (0, 0),
    (FillCase.C4, Case4Mode.LITERAL): (-1, -1),
}


def expected_delta(fill_case: FillCase, mode: Case4Mode) -> tuple[int, int]:
    if fill_case is FillCase.C4:
        return OCCUPANCY_DELTAS[(fill_case, mode)]
    return OCCUPANCY_DELTAS[fill_case]


@dataclass(slots=True)
class TagEntry:
    valid: bool = False
    tag: int = 0
    fwd: int = -1


@dataclass(slots=True)
class TagSet:
    entries: list[TagEntry]
    # way indices, most recently used first
    recency: list[int] = field(default_factory=list)
    # tag -> way for the valid entries
    index: dict[int, int] = field(default_factory=dict)
    # bit w set iff way w is valid
    valid_mask: int = 0

    def lowest_invalid_way(self) -> Optional[int]:
        way = (~self.valid_mask & (self.valid_mask + 1)).bit_length() - 1
        return way if way < len(self.entries) else None


@dataclass(slots=True)
class DataFrame:
    valid: bool = False
    back: tuple[int, int] = (-1, -1)  # (set_index, way) of the owning tag entry
    dirty: bool = False
    reuse_ctr: int = 0


class _ValidFrameIndex:
    """Fenwick tree over frame valid bits; supports r-th valid frame lookup."""

    def __init__(self, size: int):
        self.size = size
        self.tree = [0] * (size + 1)
        self.count = 0
        self._top = 1 << (size.bit_length() - 1)

    def add(self, frame: int, delta: int) -> None:
        self.count += delta
        i = frame + 1
        tree = self.tree
        while i <= self.size:
            tree[i] += delta
            i += i & -i

    def nth(self, r: int) -> int:
        """Index of the r-th (0-based) valid frame in ascending order."""
        pos = 0
        remaining = r + 1
        step = self._top
        tree = self.tree
        while step:
            nxt = pos + step
            if nxt <= self.size and tree[nxt] < remaining:
                pos = nxt
                remaining -= tree[nxt]
            step >>= 1
        return pos


class RacEngine:
    policy_name = "rac"

    def __init__(self, config: SimConfig):
        self.config = config
        self.sets = [
            TagSet([TagEntry() for _ in range(config.tag_ways)]) for _ in range(config.num_sets)
        ]
        self.frames = [DataFrame() for _ in range(config.total_frames)]
        # min-heap, so the lowest-numbered free frame is always on top
        self._free = list(range(config.total_frames))
        self._valid = _ValidFrameIndex(config.total_frames)
        self.rng = SplitMix64(config.seed)
        self._block_shift = config.block_size_bytes.bit_length() - 1
        self._set_shift = config.num_sets.bit_length() - 1
        self._set_mask = config.num_sets - 1

    @property
    def free_frames(self) -> set[int]:
        return set(self._free)

    @property
    def rng_state(self) -> int:
        return self.rng.state

    def occupancy(self) -> tuple[int, int]:
        """(valid tag entries, valid frames)."""
        return sum(len(s.index) for s in self.sets), self._valid.count

    def select_random_victim(self) -> int:
        k = self._valid.count
        if k == 0:
            raise RuntimeError("random victim requested with no valid frames")
        return self._valid.nth(self.rng.next_u64() % k)

    def _choose_victim_frame(self) -> int:
        return self.select_random_victim()

    def _on_hit(self, frame: DataFrame) -> None:
        pass

    def _evict_entry(self, set_index: int, way: int, evicted: list, refill: bool = False) -> int:
        """Invalidate a tag entry and its frame; returns the frame id.

        With ``refill`` the frame is about to be handed straight to the
        incoming block, so the valid-frame index is left untouched.
        """
        ts = self.sets[set_index]
        entry = ts.entries[way]
        fid = entry.fwd
        frame = self.frames[fid]
        evicted.append((entry.tag * self.config.num_sets + set_index, frame.dirty))
        entry.valid = False
        entry.fwd = -1
        del ts.index[entry.tag]
        ts.valid_mask &= ~(1 << way)
        ts.recency.remove(way)
        frame.valid = False
        frame.back = (-1, -1)
        frame.dirty = False
        frame.reuse_ctr = 0
        if not refill:
            self._valid.add(fid, -1)
        return fid

    def _install(self, set_index: int, way: int, tag: int, fid: int, dirty: bool, refill: bool) -> None:
        ts = self.sets[set_index]
        entry = ts.entries[way]
        entry.valid = True
        entry.tag = tag
        entry.fwd = fid
        ts.index[tag] = way
        ts.valid_mask |= 1 << way
        ts.recency.insert(0, way)
        frame = self.frames[fid]
        frame.valid = True
        frame.back = (set_index, way)
        frame.dirty = dirty
        frame.reuse_ctr = 0
        if not refill:
            self._valid.add(fid, 1)

    def access(self, access: Access) -> AccessOutcome:
        block_addr = access.address >> self._block_shift
        set_index = block_addr & self._set_mask
        tag = block_addr >> self._set_shift
        ts = self.sets[set_index]
        is_store = access.kind is AccessKind.STORE

        way = ts.index.get(tag)
        if way is not None:
            if ts.recency[0] != way:
                ts.recency.remove(way)
                ts.recency.insert(0, way)
            fid = ts.entries[way].fwd
            frame = self.frames[fid]
            if is_store:
                frame.dirty = True
            self._on_hit(frame)
            return AccessOutcome(True, frame_used=fid)

        evicted: list[tuple[int, bool]] = []
        refill = True
        way = ts.lowest_invalid_way()
        if self._free:
            if way is not None:
                case = FillCase.C1
                fid = heapq.heappop(self._free)
                refill = False
            else:
                case = FillCase.C2
                way = ts.recency[-1]
                fid = self._evict_entry(set_index, way, evicted, refill=True)
        elif way is not None:
            case = FillCase.C3
            fid = self._choose_victim_frame()
            owner_set, owner_way = self.frames[fid].back
            self._evict_entry(owner_set, owner_way, evicted, refill=True)
            # the victim may have lived in this very set
            way = ts.lowest_invalid_way()
        else:
            case = FillCase.C4
            way = ts.recency[-1]
            literal = self.config.case4_mode is Case4Mode.LITERAL
            # a lone frame leaves nothing to draw at random; reuse it instead
            if literal and self._valid.count > 1:
                lru_fid = self._evict_entry(set_index, way, evicted)
                heapq.heappush(self._free, lru_fid)
                fid = self._choose_victim_frame()
                owner_set, owner_way = self.frames[fid].back
                self._evict_entry(owner_set, owner_way, evicted, refill=True)
            else:
                fid = self._evict_entry(set_index, way, evicted, refill=True)

        self._install(set_index, way, tag, fid, is_store, refill)
        return AccessOutcome(False, case, evicted, fid)

    def check_invariants(self) -> list[str]:
        """Describe every broken structural invariant; empty when the state is sound."""
        cfg = self.config
        problems = []
        flagged_frames = set()

        for fid, frame in enumerate(self.frames):
            if not frame.valid:
                continue
            s, w = frame.back
            if not (0 <= s < cfg.num_sets and 0 <= w < cfg.tag_ways):
                problems.append(f"I1 bijection: frame {fid} back link {frame.back} out of range")
                flagged_frames.add(fid)
                continue
            owner = self.sets[s].entries[w]
            if not owner.valid:
                problems.append(f"I1 bijection: frame {fid} back link names invalid tag entry {frame.back}")
                flagged_frames.add(fid)
            elif owner.fwd != fid:
                problems.append(
                    f"I1 bijection: frame {fid} owner {frame.back} forwards to frame {owner.fwd}"
                )
                flagged_frames.add(fid)

        valid_tags = 0
        for s, ts in enumerate(self.sets):
            valid_ways = []
            seen_tags = {}
            for w, entry in enumerate(ts.entries):
                if not entry.valid:
                    continue
                valid_ways.append(w)
                valid_tags += 1
                if entry.tag in seen_tags:
                    problems.append(
                        f"I8 uniqueness: set {s} ways {seen_tags[entry.tag]} and {w} both hold tag {entry.tag:#x}"
                    )
                seen_tags[entry.tag] = w
                fid = entry.fwd
                if not 0 <= fid < cfg.total_frames:
                    problems.append(f"I1 bijection: tag entry ({s}, {w}) forward link {fid} out of range")
                elif not self.frames[fid].valid:
                    problems.append(f"I1 bijection: tag entry ({s}, {w}) forwards to invalid frame {fid}")
                elif self.frames[fid].back != (s, w) and fid not in flagged_frames:
                    problems.append(
                        f"I1 bijection: tag entry ({s}, {w}) forwards to frame {fid} owned by {self.frames[fid].back}"
                    )
            if len(valid_ways) > cfg.tag_ways:
                problems.append(f"I2 capacity: set {s} has {len(valid_ways)} valid ways")
            if sorted(ts.recency) != valid_ways:
                problems.append(f"I3 recency: set {s} recency {ts.recency} != valid ways {valid_ways}")
            if ts.index != {ts.entries[w].tag: w for w in valid_ways} or ts.valid_mask != sum(1 << w for w in valid_ways):
                problems.append(f"I3 recency: set {s} tag index out of sync with entries")

        invalid = {fid for fid, frame in enumerate(self.frames) if not frame.valid}
        valid_frames = cfg.total_frames - len(invalid)
        if valid_frames > cfg.total_frames:
            problems.append(f"I2 capacity: {valid_frames} valid frames")
        if len(self._free) != len(set(self._free)) or set(self._free) != invalid:
            problems.append(
                f"I4 free-set: free list has {len(self._free)} entries, {len(invalid)} frames invalid"
            )
        if valid_frames != valid_tags:
            problems.append(f"I1 bijection: {valid_tags} valid tag entries but {valid_frames} valid frames")
        if self._valid.count != valid_frames:
            problems.append(f"I4 free-set: valid-frame index counts {self._valid.count}, actual {valid_frames}")
        return problems


def new_engine(config: SimConfig) -> RacEngine:
    return RacEngine(config)
