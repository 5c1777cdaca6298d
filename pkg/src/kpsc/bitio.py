"""MSB-first bit streams and order-0 exponential-Golomb codes.

Signed values use the H.264 mapping: ``v > 0 -> 2v - 1``, ``v <= 0 -> -2v``.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import BitstreamError, CodingOverflowError, TruncatedStreamError

UE_MAX = (1 << 32) - 2
SE_MAX = 1 << 30


def se_to_ue(v: int) -> int:
    return 2 * v - 1 if v > 0 else -2 * v


def ue_to_se(u: int) -> int:
    return (u + 1) >> 1 if u & 1 else -(u >> 1)


def _check_ue(n: int) -> None:
    if n < 0 or n > UE_MAX:
        raise CodingOverflowError(f"unsigned value {n} outside [0, {UE_MAX}]")


def _check_se(v: int) -> None:
    if v > SE_MAX or v < -SE_MAX:
        raise CodingOverflowError(f"signed value {v} outside [-{SE_MAX}, {SE_MAX}]")


def bit_length_ue(n: int) -> int:
    _check_ue(n)
    return 2 * (n + 1).bit_length() - 1


def bit_length_se(v: int) -> int:
    """Length in bits of the signed codeword for ``v``, without emitting it."""
    _check_se(v)
    return 2 * (se_to_ue(v) + 1).bit_length() - 1


class BitWriter:
    """Accumulates bit fields; bytes are produced on :meth:`getvalue`."""

    def __init__(self):
        self._values: list[int] = []
        self._widths: list[int] = []
        self.bit_length = 0

    def write_bits(self, value: int, count: int) -> None:
        if count < 0 or count > 32:
            raise ValueError(f"bit count {count} outside [0, 32]")
        if value < 0 or value >> count:
            raise CodingOverflowError(f"value {value} does not fit in {count} bits")
        self._values.append(value)
        self._widths.append(count)
        self.bit_length += count

    def write_flags(self, flags) -> None:
        """Write a sequence of 0/1 flags, first flag first."""
        flags = list(flags)
        for start in range(0, len(flags), 32):
            chunk = flags[start:start + 32]
            value = 0
            for f in chunk:
                value = (value << 1) | (1 if f else 0)
            self.write_bits(value, len(chunk))

    def write_ue(self, n: int) -> int:
        _check_ue(n)
        length = (n + 1).bit_length()
        # prefix and payload kept as separate fields so widths stay <= 33
        self._values.append(0)
        self._widths.append(length - 1)
        self._values.append(n + 1)
        self._widths.append(length)
        bits = 2 * length - 1
        self.bit_length += bits
        return bits

    def write_se(self, v: int) -> int:
        _check_se(v)
        return self.write_ue(se_to_ue(v))

    def getvalue(self) -> bytes:
        return _kernels.pack_fields(self._values, self._widths).tobytes()

    def to_bitstring(self) -> str:
        return "".join(format(v, f"0{w}b") if w else "" for v, w in zip(self._values, self._widths))


def ue_encode(writer: BitWriter, n: int) -> int:
    return writer.write_ue(n)


def se_encode(writer: BitWriter, v: int) -> int:
    return writer.write_se(v)


class BitReader:
    """Reads MSB-first fields from a byte string, raising on overrun."""

    def __init__(self, data: bytes, bitpos: int = 0):
        self.data = bytes(data)
        self._buf = np.frombuffer(self.data, dtype=np.uint8)
        self.bitpos = bitpos
        self.nbits = len(self.data) * 8
        self.frame = None  # attached to truncation errors when set

    @property
    def remaining(self) -> int:
        return self.nbits - self.bitpos

    def _truncated(self):
        return TruncatedStreamError("truncated stream", frame=self.frame)

    def _peek(self, count: int) -> int:
        # caller guarantees count <= remaining
        start = self.bitpos >> 3
        end = (self.bitpos + count + 7) >> 3
        window = int.from_bytes(self.data[start:end], "big")
        tail = end * 8 - self.bitpos - count
        return (window >> tail) & ((1 << count) - 1)

    def read_bits(self, count: int) -> int:
        if count < 0 or count > 32:
            raise ValueError(f"bit count {count} outside [0, 32]")
        if count > self.remaining:
            raise self._truncated()
        value = self._peek(count) if count else 0
        self.bitpos += count
        return value

    def read_flags(self, count: int) -> tuple[int, ...]:
        out = []
        while count > 0:
            chunk = min(count, 32)
            value = self.read_bits(chunk)
            out.extend((value >> (chunk - 1 - k)) & 1 for k in range(chunk))
            count -= chunk
        return tuple(out)

    def read_ue(self) -> int:
        zeros = 0
        while True:
            if self.bitpos >= self.nbits:
                raise self._truncated()
            span = min(32, self.remaining)
            window = self._peek(span)
            if window:
                zeros += span - window.bit_length()
                self.bitpos += span - window.bit_length()
                break
            zeros += span
            self.bitpos += span
            if zeros > 32:
                raise BitstreamError("exp-Golomb prefix longer than 32 bits")
        if zeros + 1 > self.remaining:
            raise self._truncated()
        value = self._peek(zeros + 1)
        self.bitpos += zeros + 1
        return value - 1

    def read_se(self) -> int:
        return ue_to_se(self.read_ue())

    def read_se_array(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.int64)
        pos = _kernels.decode_se_run(self._buf, self.bitpos, count, out)
        if pos < 0:
            raise self._truncated()
        self.bitpos = pos
        return out


def ue_decode(reader: BitReader) -> int:
    return reader.read_ue()


def se_decode(reader: BitReader) -> int:
    return reader.read_se()
