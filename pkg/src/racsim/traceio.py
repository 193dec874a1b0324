"""Trace formats and synthetic workload generators.

Three on-disk formats are understood:

* canonical text: ``R <addr>`` / ``W <addr>`` per line, hex (``0x``) or
  decimal, ``#`` comments and blank lines ignored;
* canonical binary: magic ``RACTRC01`` then 9-byte records
  (opcode byte 0x00 load / 0x01 store, little-endian u64 address);
* ChampSim: headerless 64-byte little-endian instruction records.
  Compressed ``.xz`` traces must be decompressed externally and piped in.
"""

from __future__ import annotations

import itertools
import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, Sequence, TextIO

from .config import BaselineConfig, SimConfig
from .records import Access, AccessKind
from .rng import MASK64, SplitMix64

BINARY_MAGIC = b"RACTRC01"
_BIN_RECORD = struct.Struct("<BQ")
_OPCODES = {0x00: AccessKind.LOAD, 0x01: AccessKind.STORE}

NUM_INSTR_DESTINATIONS = 2
NUM_INSTR_SOURCES = 4
_CHAMPSIM_RECORD = struct.Struct(
    f"<QBB{NUM_INSTR_DESTINATIONS}B{NUM_INSTR_SOURCES}B{NUM_INSTR_DESTINATIONS}Q{NUM_INSTR_SOURCES}Q"
)
CHAMPSIM_RECORD_SIZE = _CHAMPSIM_RECORD.size  # 64


class TraceFormatError(ValueError):
    """A trace could not be decoded.  ``index`` is the 1-based line number for
    text traces and the 0-based record index for binary ones."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class MalformedLineError(TraceFormatError):
    pass


class BadMagicError(TraceFormatError):
    pass


class TruncatedRecordError(TraceFormatError):
    pass


class UnknownOpcodeError(TraceFormatError):
    pass


@dataclass
class TraceStream:
    accesses: list[Access] = field(default_factory=list)
    source: str = ""

    def __iter__(self):
        return iter(self.accesses)

    def __len__(self):
        return len(self.accesses)


@dataclass(frozen=True)
class ChampSimInstr:
    ip: int = 0
    is_branch: int = 0
    branch_taken: int = 0
    dest_regs: tuple[int, ...] = (0,) * NUM_INSTR_DESTINATIONS
    src_regs: tuple[int, ...] = (0,) * NUM_INSTR_SOURCES
    dest_mem: tuple[int, ...] = (0,) * NUM_INSTR_DESTINATIONS
    src_mem: tuple[int, ...] = (0,) * NUM_INSTR_SOURCES


# -- canonical text ---------------------------------------------------------


def _parse_address(token: str) -> int:
    if token[:2].lower() == "0x":
        value = int(token[2:], 16)
    else:
        value = int(token, 10)
    if not 0 <= value <= MASK64:
        raise ValueError("address out of 64-bit range")
    return value


def parse_text_line(line: str, lineno: int = 0) -> Access:
    """Parse one ``R|W <address>`` line.  Callers skip blanks and comments."""
    parts = line.split()
    if len(parts) != 2 or parts[0] not in ("R", "W"):
        raise MalformedLineError(f"line {lineno}: malformed trace line {line.strip()!r}", lineno)
    try:
        address = _parse_address(parts[1])
    except ValueError:
        raise MalformedLineError(f"line {lineno}: bad address {parts[1]!r}", lineno) from None
    return Access(AccessKind.LOAD if parts[0] == "R" else AccessKind.STORE, address)


def iter_text(lines: Iterable[str]) -> Iterator[Access]:
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield parse_text_line(stripped, lineno)


def format_text(accesses: Iterable[Access]) -> str:
    return "".join(f"{'R' if a.kind is AccessKind.LOAD else 'W'} {a.address:#x}\n" for a in accesses)


# -- canonical binary -------------------------------------------------------


def encode_canonical_binary(accesses: Iterable[Access]) -> bytes:
    out = bytearray(BINARY_MAGIC)
    for a in accesses:
        out += _BIN_RECORD.pack(0x00 if a.kind is AccessKind.LOAD else 0x01, a.address)
    return bytes(out)


def iter_canonical_binary(stream: BinaryIO) -> Iterator[Access]:
    magic = stream.read(len(BINARY_MAGIC))
    if magic != BINARY_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {BINARY_MAGIC!r}", 0)
    size = _BIN_RECORD.size
    for index in itertools.count():
        chunk = stream.read(size)
        if not chunk:
            return
        if len(chunk) < size:
            raise TruncatedRecordError(f"record {index}: truncated ({len(chunk)} of {size} bytes)", index)
        opcode, address = _BIN_RECORD.unpack(chunk)
        kind = _OPCODES.get(opcode)
        if kind is None:
            raise UnknownOpcodeError(f"record {index}: unknown opcode {opcode:#04x}", index)
        yield Access(kind, address)


def decode_canonical_binary(stream: BinaryIO) -> TraceStream:
    return TraceStream(list(iter_canonical_binary(stream)), "bin")


# -- ChampSim ---------------------------------------------------------------


def decode_champsim_record(data: bytes, index: int = 0) -> ChampSimInstr:
    if len(data) != CHAMPSIM_RECORD_SIZE:
        raise TruncatedRecordError(
            f"record {index}: truncated ({len(data)} of {CHAMPSIM_RECORD_SIZE} bytes)", index
        )
    f = _CHAMPSIM_RECORD.unpack(data)
    d, s = NUM_INSTR_DESTINATIONS, NUM_INSTR_SOURCES
    return ChampSimInstr(
        ip=f[0],
        is_branch=f[1],
        branch_taken=f[2],
        dest_regs=tuple(f[3 : 3 + d]),
        src_regs=tuple(f[3 + d : 3 + d + s]),
        dest_mem=tuple(f[3 + d + s : 3 + 2 * d + s]),
        src_mem=tuple(f[3 + 2 * d + s :]),
    )


def encode_champsim_record(instr: ChampSimInstr) -> bytes:
    return _CHAMPSIM_RECORD.pack(
        instr.ip,
        instr.is_branch,
        instr.branch_taken,
        *instr.dest_regs,
        *instr.src_regs,
        *instr.dest_mem,
        *instr.src_mem,
    )


def accesses_from_instr(instr: ChampSimInstr) -> list[Access]:
    """Loads for each nonzero source address, then stores for each nonzero destination."""
    out = [Access(AccessKind.LOAD, a) for a in instr.src_mem if a]
    out += [Access(AccessKind.STORE, a) for a in instr.dest_mem if a]
    return out


def iter_champsim(stream: BinaryIO) -> Iterator[Access]:
    for index in itertools.count():
        chunk = stream.read(CHAMPSIM_RECORD_SIZE)
        if not chunk:
            return
        yield from accesses_from_instr(decode_champsim_record(chunk, index))


# -- dispatch ---------------------------------------------------------------

FORMATS = ("text", "bin", "champsim")


def iter_trace(fmt: str, stream: BinaryIO | TextIO) -> Iterator[Access]:
    """Stream accesses from an open file: text mode for ``text``, binary otherwise."""
    if fmt == "text":
        return iter_text(stream)
    if fmt == "bin":
        return iter_canonical_binary(stream)
    if fmt == "champsim":
        return iter_champsim(stream)
    raise ValueError(f"unknown trace format {fmt!r}")


# -- generators -------------------------------------------------------------


def gen_uniform(n_blocks: int, length: int, seed: int = 0, block_size: int = 64) -> TraceStream:
    if n_blocks < 1:
        raise ValueError("n_blocks must be >= 1")
    if length < 0:
        raise ValueError("length must be >= 0")
    rng = SplitMix64(seed)
    return TraceStream(
        [Access(AccessKind.LOAD, (rng.next_u64() % n_blocks) * block_size) for _ in range(length)],
        f"uniform(n_blocks={n_blocks}, length={length}, seed={seed})",
    )


def zipf_cdf(n_blocks: int, s: float) -> list[float]:
    weights = [i ** -s for i in range(1, n_blocks + 1)]
    total = sum(weights)
    return [c / total for c in itertools.accumulate(weights)]


def gen_zipf(n_blocks: int, s: float, length: int, seed: int = 0, block_size: int = 64) -> TraceStream:
    """Zipf-popular loads; block 0 is rank 1, the hottest."""
    if n_blocks < 1:
        raise ValueError("n_blocks must be >= 1")
    if s < 0:
        raise ValueError("zipf exponent s must be >= 0")
    if length < 0:
        raise ValueError("length must be >= 0")
    cdf = zipf_cdf(n_blocks, s)
    rng = SplitMix64(seed)
    last = n_blocks - 1
    accesses = []
    for _ in range(length):
        block = min(bisect_right(cdf, rng.next_unit()), last)
        accesses.append(Access(AccessKind.LOAD, block * block_size))
    return TraceStream(accesses, f"zipf(n_blocks={n_blocks}, s={s}, length={length}, seed={seed})")


def gen_cyclic(block_list: Sequence[int], passes: int, block_size: int = 64) -> TraceStream:
    if passes < 0:
        raise ValueError("passes must be >= 0")
    accesses = [Access(AccessKind.LOAD, b * block_size) for b in block_list] * passes
    return TraceStream(accesses, f"cyclic(blocks={len(block_list)}, passes={passes})")


def gen_single_set(config: SimConfig | BaselineConfig, set_index: int, distinct: int, passes: int) -> TraceStream:
    """Cycle ``distinct`` blocks that all map to ``set_index``."""
    if not 0 <= set_index < config.num_sets:
        raise ValueError(f"set_index must be in [0, {config.num_sets})")
    if distinct < 1:
        raise ValueError("distinct must be >= 1")
    if passes < 0:
        raise ValueError("passes must be >= 0")
    blocks = [i * config.num_sets + set_index for i in range(distinct)]
    stream = gen_cyclic(blocks, passes, config.block_size_bytes)
    stream.source = f"single_set(set={set_index}, distinct={distinct}, passes={passes})"
    return stream
