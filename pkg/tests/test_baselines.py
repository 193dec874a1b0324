import pytest
from hypothesis import given, settings, strategies as st

from racsim import Access, BaselineConfig, FillCase, LruCache, RandomCache, SimConfig, VWayEngine, make_engine
from racsim.traceio import gen_single_set

from conftest import loads


def test_lru_evicts_oldest():
    c = LruCache(BaselineConfig(num_sets=1, ways=4))
    outs = [c.access(a) for a in loads(0, 1, 2, 3, 4)]
    assert outs[-1].fill_case is FillCase.C2
    assert outs[-1].evicted == [(0, False)]


def test_lru_hit_refreshes_recency():
    c = LruCache(BaselineConfig(num_sets=1, ways=2))
    outs = [c.access(a) for a in loads(0, 1, 0, 2)]
    assert outs[-1].evicted == [(1, False)]


@pytest.mark.parametrize("width, hits", [(16, 144), (20, 0)])
def test_lru_cyclic_single_set(width, hits):
    c = LruCache(BaselineConfig(num_sets=1, ways=16))
    outs = [c.access(a) for a in loads(*range(width)) * 10]
    assert sum(o.hit for o in outs) == hits


def test_random_single_way_always_way0():
    c = RandomCache(BaselineConfig(num_sets=1, ways=1, seed=99))
    outs = [c.access(a) for a in loads(0, 1, 2, 3)]
    assert [o.frame_used for o in outs] == [0, 0, 0, 0]


def test_random_first_miss_fills_way0():
    out = RandomCache(BaselineConfig(num_sets=4, ways=4)).access(Access.load(0))
    assert out.frame_used == 0 and out.evicted == [] and out.fill_case is FillCase.C1


def test_random_seed0_full_set_victim():
    c = RandomCache(BaselineConfig(num_sets=1, ways=4, seed=0))
    for a in loads(0, 1, 2, 3):
        c.access(a)
    assert c.rng.state == 0  # no draws while filling
    out = c.access(Access.load(4 * 64))
    assert out.frame_used == 3
    assert out.evicted == [(3, False)]


def _vway_with_counters(counters):
    # one set with plenty of tag ways, frames == len(counters)
    e = VWayEngine(SimConfig(num_sets=1, tag_ways=8, data_ways=len(counters)))
    for a in loads(*range(len(counters))):
        e.access(a)
    for f, c in zip(e.frames, counters):
        f.reuse_ctr = c
    return e


def test_vway_zero_counters_pick_ptr():
    e = _vway_with_counters([0, 0, 0])
    assert e._choose_victim_frame() == 0
    assert e.ptr == 1


def test_vway_scan_decrements_then_evicts():
    e = _vway_with_counters([1, 0, 2])
    assert e._choose_victim_frame() == 1
    assert e.ptr == 2
    assert [f.reuse_ctr for f in e.frames] == [0, 0, 2]


def test_vway_counter_saturates():
    e = VWayEngine(SimConfig(num_sets=1, tag_ways=2, data_ways=2))
    e.access(Access.load(0))
    for _ in range(5):
        assert e.access(Access.load(0)).hit
    assert e.frames[0].reuse_ctr == 3


def test_vway_fill_resets_counter():
    e = _vway_with_counters([3, 3, 3])
    out = e.access(Access.load(3 * 64))  # c3: frames full, tag ways free
    assert out.fill_case is FillCase.C3
    assert e.frames[out.frame_used].reuse_ctr == 0


def test_rac_keeps_reuse_counters_zero():
    e = make_engine("rac", SimConfig(num_sets=1, tag_ways=2, data_ways=2))
    for a in loads(0, 0, 0):
        e.access(a)
    assert e.frames[0].reuse_ctr == 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=40), st.data())
def test_vway_scan_terminates_within_four_laps(counters, data):
    e = _vway_with_counters(counters)
    e.ptr = data.draw(st.integers(0, len(counters) - 1))
    start_total = sum(counters)
    victim = e._choose_victim_frame()
    # every scan step before the victim spends one counter unit
    assert start_total - sum(f.reuse_ctr for f in e.frames) < 4 * len(counters)
    assert e.frames[victim].reuse_ctr == 0
    assert e.ptr == (victim + 1) % len(counters)


@pytest.mark.parametrize("width", [17, 20, 32])
def test_decoupled_policies_absorb_hot_set(width):
    config = SimConfig()
    trace = list(gen_single_set(config, 7, width, 5))
    rates = {}
    for policy in ("rac", "vway", "lru"):
        eng = make_engine(policy, config)
        outs = [eng.access(a) for a in trace]
        rates[policy] = sum(o.hit for o in outs[width:]) / len(outs[width:])
    assert rates["rac"] == rates["vway"] == 1.0
    assert rates["lru"] == 0.0


def test_baseline_invariants_after_run():
    for cls in (LruCache, RandomCache):
        c = cls(BaselineConfig(num_sets=2, ways=3, seed=5))
        for a in loads(*[(i * 7) % 23 for i in range(500)]):
            c.access(a)
        assert c.check_invariants() == []


def test_make_engine_rejects_unknown():
    with pytest.raises(ValueError):
        make_engine("plru", SimConfig())
