import io
import struct
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from racsim import Access, AccessKind, SimConfig, map_address
from racsim.traceio import (
    BINARY_MAGIC,
    BadMagicError,
    ChampSimInstr,
    MalformedLineError,
    TruncatedRecordError,
    UnknownOpcodeError,
    accesses_from_instr,
    decode_canonical_binary,
    decode_champsim_record,
    encode_canonical_binary,
    encode_champsim_record,
    format_text,
    gen_cyclic,
    gen_single_set,
    gen_uniform,
    gen_zipf,
    iter_champsim,
    iter_text,
    parse_text_line,
    zipf_cdf,
)

accesses = st.builds(Access, st.sampled_from(list(AccessKind)), st.integers(0, (1 << 64) - 1))


def test_parse_text_hex_and_decimal():
    assert parse_text_line("R 0x40") == Access.load(0x40)
    assert parse_text_line("W 64") == Access.store(0x40)


@pytest.mark.parametrize("line", ["X 0x40", "R", "R 0x40 extra", "R zz", "W -1", f"R {1 << 64}"])
def test_parse_text_rejects(line):
    with pytest.raises(MalformedLineError):
        parse_text_line(line, 7)


def test_iter_text_skips_comments_and_reports_line_number():
    text = "# header\n\nR 0x0\nW 0x40\n  # indented comment\nbogus\n"
    it = iter_text(io.StringIO(text))
    assert next(it) == Access.load(0)
    assert next(it) == Access.store(0x40)
    with pytest.raises(MalformedLineError) as exc:
        next(it)
    assert exc.value.index == 6


@given(st.lists(accesses, max_size=50))
def test_text_round_trip(trace):
    assert list(iter_text(io.StringIO(format_text(trace)))) == trace


def test_binary_single_record():
    data = BINARY_MAGIC + bytes([0x00, 0x40, 0, 0, 0, 0, 0, 0, 0])
    assert decode_canonical_binary(io.BytesIO(data)).accesses == [Access.load(0x40)]


def test_binary_round_trip_1000():
    trace = [Access(AccessKind.STORE if i % 3 == 0 else AccessKind.LOAD, a.address) for i, a in enumerate(gen_uniform(1 << 40, 1000, seed=4))]
    assert decode_canonical_binary(io.BytesIO(encode_canonical_binary(trace))).accesses == trace


@given(st.lists(accesses, max_size=100))
def test_binary_round_trip_property(trace):
    assert decode_canonical_binary(io.BytesIO(encode_canonical_binary(trace))).accesses == trace


def test_binary_truncated():
    data = encode_canonical_binary([Access.load(0)]) + b"\x00" * 5
    with pytest.raises(TruncatedRecordError) as exc:
        decode_canonical_binary(io.BytesIO(data))
    assert exc.value.index == 1


def test_binary_bad_magic():
    with pytest.raises(BadMagicError):
        decode_canonical_binary(io.BytesIO(b"RACTRC02" + b"\x00" * 9))


def test_binary_unknown_opcode():
    with pytest.raises(UnknownOpcodeError):
        decode_canonical_binary(io.BytesIO(BINARY_MAGIC + b"\x02" + b"\x00" * 8))


def _raw_record(ip=0, src=(0, 0, 0, 0), dst=(0, 0)):
    # assembled by hand from the field offsets, independently of the codec
    raw = bytearray(64)
    raw[0:8] = ip.to_bytes(8, "little")
    raw[8], raw[9] = 1, 0
    raw[10:12] = bytes([3, 4])
    raw[12:16] = bytes([5, 6, 7, 8])
    for i, a in enumerate(dst):
        raw[16 + 8 * i : 24 + 8 * i] = a.to_bytes(8, "little")
    for i, a in enumerate(src):
        raw[32 + 8 * i : 40 + 8 * i] = a.to_bytes(8, "little")
    return bytes(raw)


def test_champsim_field_offsets():
    instr = decode_champsim_record(_raw_record(ip=0xDEADBEEF, src=(0x1000, 0, 0, 0), dst=(0, 0x2000)))
    assert instr.ip == 0xDEADBEEF
    assert (instr.is_branch, instr.branch_taken) == (1, 0)
    assert instr.dest_regs == (3, 4) and instr.src_regs == (5, 6, 7, 8)
    assert instr.src_mem == (0x1000, 0, 0, 0) and instr.dest_mem == (0, 0x2000)


def test_champsim_one_load():
    instr = decode_champsim_record(_raw_record(src=(0x1000, 0, 0, 0)))
    assert accesses_from_instr(instr) == [Access.load(0x1000)]


def test_champsim_zero_record():
    assert accesses_from_instr(decode_champsim_record(bytes(64))) == []


def test_champsim_ordering():
    instr = ChampSimInstr(src_mem=(0xA0, 0xB0, 0, 0), dest_mem=(0xC0, 0))
    assert accesses_from_instr(instr) == [Access.load(0xA0), Access.load(0xB0), Access.store(0xC0)]


def test_champsim_truncated_tail():
    data = _raw_record(src=(0x40, 0, 0, 0)) + bytes(63)
    it = iter_champsim(io.BytesIO(data))
    assert next(it) == Access.load(0x40)
    with pytest.raises(TruncatedRecordError) as exc:
        next(it)
    assert exc.value.index == 1


u64 = st.integers(0, (1 << 64) - 1)
instrs = st.builds(
    ChampSimInstr,
    ip=u64,
    is_branch=st.integers(0, 255),
    branch_taken=st.integers(0, 255),
    dest_regs=st.tuples(*[st.integers(0, 255)] * 2),
    src_regs=st.tuples(*[st.integers(0, 255)] * 4),
    dest_mem=st.tuples(u64, u64),
    src_mem=st.tuples(u64, u64, u64, u64),
)


@given(instrs)
def test_champsim_round_trip(instr):
    raw = encode_champsim_record(instr)
    assert len(raw) == 64
    assert decode_champsim_record(raw) == instr
    assert len(accesses_from_instr(instr)) == sum(1 for a in instr.src_mem + instr.dest_mem if a)


def test_gen_cyclic():
    assert [a.address for a in gen_cyclic([1, 2], 3)] == [64, 128] * 3


def test_gen_single_set_default_geometry():
    config = SimConfig()
    stream = gen_single_set(config, 7, 20, 10)
    assert len(stream) == 200
    assert all(map_address(config, a.address).set_index == 7 for a in stream)
    assert len({a.address for a in stream}) == 20


@given(st.integers(0, 5), st.integers(1, 30), st.integers(1, 3), st.data())
def test_gen_single_set_maps_to_requested_set(log_sets, distinct, passes, data):
    config = SimConfig(num_sets=1 << log_sets)
    set_index = data.draw(st.integers(0, config.num_sets - 1))
    stream = gen_single_set(config, set_index, distinct, passes)
    assert len(stream) == distinct * passes
    assert {map_address(config, a.address).set_index for a in stream} == {set_index}


def test_gen_uniform_deterministic_and_in_range():
    a = gen_uniform(100, 500, seed=3)
    assert a.accesses == gen_uniform(100, 500, seed=3).accesses
    assert a.accesses != gen_uniform(100, 500, seed=4).accesses
    assert all(x.address % 64 == 0 and x.address // 64 < 100 for x in a)


def test_gen_uniform_first_block_seed0():
    # seed 0 first draw is 0xE220A8397B1DCDAF; mod 1000 == 871
    assert gen_uniform(1000, 1, seed=0).accesses[0].address == (0xE220A8397B1DCDAF % 1000) * 64


def test_zipf_s0_is_uniform():
    cdf = zipf_cdf(8, 0.0)
    assert cdf == pytest.approx([(i + 1) / 8 for i in range(8)])
    counts = Counter(a.address // 64 for a in gen_zipf(8, 0.0, 16000, seed=2))
    assert set(counts) == set(range(8))
    assert all(abs(c - 2000) < 200 for c in counts.values())


def test_zipf_rank1_is_hottest():
    counts = Counter(a.address // 64 for a in gen_zipf(50, 1.2, 20000, seed=1))
    assert counts.most_common(1)[0][0] == 0
    assert counts[0] > counts[1] > counts[5]


@pytest.mark.parametrize(
    "call",
    [
        lambda: gen_uniform(0, 10),
        lambda: gen_zipf(10, -1, 10),
        lambda: gen_zipf(0, 1, 10),
        lambda: gen_single_set(SimConfig(num_sets=4), 4, 1, 1),
        lambda: gen_single_set(SimConfig(), 0, 0, 1),
        lambda: gen_cyclic([1], -1),
    ],
)
def test_generator_parameter_errors(call):
    with pytest.raises(ValueError):
        call()
