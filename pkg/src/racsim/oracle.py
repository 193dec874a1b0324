"""Naive reference replay of every policy, for equivalence testing.

Deliberately shares no code with the engines beyond the record types:
plain tables, linear scans, and LRU via per-entry timestamps instead of an
ordered recency list.  Only practical for small geometries.
"""

from __future__ import annotations

from typing import Iterable

from .config import BaselineConfig, Case4Mode, SimConfig
from .records import Access, AccessKind, AccessOutcome, FillCase

_M = (1 << 64) - 1


class _Rng:
    def __init__(self, seed):
        self.s = seed

    def draw(self):
        self.s = (self.s + 0x9E3779B97F4A7C15) & _M
        z = self.s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M
        return z ^ (z >> 31)


class OracleState:
    """Tables mirroring the engine state: tag[s][w] and frame[f] as dicts."""

    def __init__(self, num_sets, tag_ways, n_frames, block_size, seed):
        self.num_sets = num_sets
        self.tag_ways = tag_ways
        self.block_size = block_size
        self.tag = [
            [{"valid": False, "tag": 0, "fwd": None, "stamp": 0} for _ in range(tag_ways)]
            for _ in range(num_sets)
        ]
        self.frame = [
            {"valid": False, "set": None, "way": None, "dirty": False, "ctr": 0} for _ in range(n_frames)
        ]
        self.clock = 0
        self.rng = _Rng(seed)
        self.ptr = 0

    def tick(self):
        self.clock += 1
        return self.clock

    def find(self, s, t):
        found = None
        for w, e in enumerate(self.tag[s]):
            if e["valid"] and e["tag"] == t:
                assert found is None, "duplicate tag in set"
                found = w
        return found

    def first_invalid_way(self, s):
        for w in range(self.tag_ways):
            if not self.tag[s][w]["valid"]:
                return w
        return None

    def first_invalid_frame(self):
        for f in range(len(self.frame)):
            if not self.frame[f]["valid"]:
                return f
        return None

    def lru_way(self, s):
        best = None
        for w in range(self.tag_ways):
            e = self.tag[s][w]
            if e["valid"] and (best is None or e["stamp"] < self.tag[s][best]["stamp"]):
                best = w
        return best

    def valid_frames(self):
        return [f for f in range(len(self.frame)) if self.frame[f]["valid"]]

    def evict(self, s, w, evicted):
        e = self.tag[s][w]
        f = e["fwd"]
        evicted.append((e["tag"] * self.num_sets + s, self.frame[f]["dirty"]))
        e["valid"] = False
        e["fwd"] = None
        self.frame[f].update(valid=False, set=None, way=None, dirty=False, ctr=0)
        return f

    def fill(self, s, w, t, f, dirty):
        self.tag[s][w].update(valid=True, tag=t, fwd=f, stamp=self.tick())
        self.frame[f].update(valid=True, set=s, way=w, dirty=dirty, ctr=0)


def _random_frame(st: OracleState):
    valid = st.valid_frames()
    r = st.rng.draw() % len(valid)
    return valid[r]


def _reuse_frame(st: OracleState):
    n = len(st.frame)
    while True:
        f = st.ptr
        st.ptr = (st.ptr + 1) % n
        fr = st.frame[f]
        if not fr["valid"]:
            continue
        if fr["ctr"] == 0:
            return f
        fr["ctr"] -= 1


def _decoupled_step(st: OracleState, acc: Access, mode: Case4Mode, reuse: bool) -> AccessOutcome:
    block = acc.address // st.block_size
    s = block % st.num_sets
    t = block // st.num_sets
    store = acc.kind == AccessKind.STORE
    pick = _reuse_frame if reuse else _random_frame

    w = st.find(s, t)
    if w is not None:
        e = st.tag[s][w]
        e["stamp"] = st.tick()
        fr = st.frame[e["fwd"]]
        if store:
            fr["dirty"] = True
        if reuse:
            fr["ctr"] = min(fr["ctr"] + 1, 3)
        return AccessOutcome(True, FillCase.NONE, [], e["fwd"])

    evicted = []
    free_way = st.first_invalid_way(s)
    free_frame = st.first_invalid_frame()
    if free_way is not None and free_frame is not None:
        case, w, f = FillCase.C1, free_way, free_frame
    elif free_frame is not None:
        case = FillCase.C2
        w = st.lru_way(s)
        f = st.evict(s, w, evicted)
    elif free_way is not None:
        case = FillCase.C3
        f = pick(st)
        st.evict(st.frame[f]["set"], st.frame[f]["way"], evicted)
        w = st.first_invalid_way(s)
    else:
        case = FillCase.C4
        w = st.lru_way(s)
        f = st.evict(s, w, evicted)
        if mode == Case4Mode.LITERAL and st.valid_frames():
            f = pick(st)
            st.evict(st.frame[f]["set"], st.frame[f]["way"], evicted)
    st.fill(s, w, t, f, store)
    return AccessOutcome(False, case, evicted, f)


def _setassoc_step(st: OracleState, acc: Access, random_victim: bool) -> AccessOutcome:
    # frames are statically bound: way w of set s owns frame s * ways + w
    block = acc.address // st.block_size
    s = block % st.num_sets
    t = block // st.num_sets
    store = acc.kind == AccessKind.STORE
    ways = st.tag_ways

    w = st.find(s, t)
    if w is not None:
        st.tag[s][w]["stamp"] = st.tick()
        if store:
            st.frame[s * ways + w]["dirty"] = True
        return AccessOutcome(True, FillCase.NONE, [], s * ways + w)

    evicted = []
    w = st.first_invalid_way(s)
    if w is not None:
        case = FillCase.C1
    else:
        case = FillCase.C2
        w = st.rng.draw() % ways if random_victim else st.lru_way(s)
        e = st.tag[s][w]
        evicted.append((e["tag"] * st.num_sets + s, st.frame[s * ways + w]["dirty"]))
    f = s * ways + w
    st.fill(s, w, t, f, store)
    return AccessOutcome(False, case, evicted, f)


def oracle_steps(config: SimConfig | BaselineConfig, policy: str, trace: Iterable[Access]):
    """Yield ``(outcome, state)`` after each access; ``state`` is live, not a copy."""
    if policy in ("rac", "vway"):
        if not isinstance(config, SimConfig):
            raise TypeError(f"policy {policy!r} needs a SimConfig")
        st = OracleState(config.num_sets, config.tag_ways, config.total_frames, config.block_size_bytes, config.seed)
        reuse = policy == "vway"
        for a in trace:
            yield _decoupled_step(st, a, config.case4_mode, reuse), st
    elif policy in ("lru", "random"):
        ways = config.ways if isinstance(config, BaselineConfig) else config.data_ways
        st = OracleState(config.num_sets, ways, config.num_sets * ways, config.block_size_bytes, config.seed)
        for a in trace:
            yield _setassoc_step(st, a, policy == "random"), st
    else:
        raise ValueError(f"unknown policy {policy!r}")


def oracle_replay(config: SimConfig | BaselineConfig, policy: str, trace: Iterable[Access]) -> list[AccessOutcome]:
    """Replay ``trace`` under ``policy`` and return one outcome per access.

    ``rac`` and ``vway`` need a SimConfig.  ``lru`` and ``random`` accept a
    BaselineConfig, or a SimConfig whose ``data_ways`` is used as the
    associativity.
    """
    if policy not in ("rac", "vway", "lru", "random"):
        raise ValueError(f"unknown policy {policy!r}")
    return [outcome for outcome, _ in oracle_steps(config, policy, trace)]


def as_engine(st: OracleState, config: SimConfig):
    """Load a decoupled-policy oracle state into a RacEngine so the engine's
    invariant predicate can be run against it."""
    import heapq

    from .core import RacEngine

    eng = RacEngine(config)
    for s in range(st.num_sets):
        ts = eng.sets[s]
        for w, e in enumerate(st.tag[s]):
            ent = ts.entries[w]
            ent.valid, ent.tag = e["valid"], e["tag"]
            ent.fwd = e["fwd"] if e["valid"] else -1
            if e["valid"]:
                ts.index[e["tag"]] = w
                ts.valid_mask |= 1 << w
        valid = [w for w in range(st.tag_ways) if st.tag[s][w]["valid"]]
        ts.recency = sorted(valid, key=lambda w: -st.tag[s][w]["stamp"])
    eng._free = []
    for f, fr in enumerate(st.frame):
        frame = eng.frames[f]
        frame.valid, frame.dirty, frame.reuse_ctr = fr["valid"], fr["dirty"], fr["ctr"]
        if fr["valid"]:
            frame.back = (fr["set"], fr["way"])
            eng._valid.add(f, 1)
        else:
            heapq.heappush(eng._free, f)
    eng.rng.state = st.rng.s
    return eng
