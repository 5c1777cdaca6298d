import pytest
from hypothesis import given, strategies as st

from kpsc.bitio import (
    BitReader,
    BitWriter,
    bit_length_se,
    bit_length_ue,
    se_decode,
    se_encode,
    ue_decode,
    ue_encode,
)
from kpsc.errors import CodingOverflowError, TruncatedStreamError


def ue_oracle(n):
    # order-0 exp-Golomb from its textual definition
    payload = bin(n + 1)[2:]
    return "0" * (len(payload) - 1) + payload


def se_oracle(v):
    return ue_oracle(2 * v - 1 if v > 0 else -2 * v)


def bits_to_bytes(bits):
    bits = bits + "0" * (-len(bits) % 8)
    return bytes(int(bits[i:i + 8], 2) for i in range(0, len(bits), 8))


@pytest.mark.parametrize("n,code", [(0, "1"), (1, "010"), (2, "011"), (3, "00100"), (4, "00101"), (7, "0001000")])
def test_ue_codewords(n, code):
    assert ue_oracle(n) == code
    w = BitWriter()
    ue_encode(w, n)
    assert w.to_bitstring() == code


@pytest.mark.parametrize("v,code", [(0, "1"), (1, "010"), (-1, "011"), (2, "00100"), (-2, "00101")])
def test_se_codewords(v, code):
    w = BitWriter()
    se_encode(w, v)
    assert w.to_bitstring() == code == se_oracle(v)


def test_ue_decode_examples():
    assert ue_decode(BitReader(bits_to_bytes("1"))) == 0
    assert ue_decode(BitReader(bits_to_bytes("00101"))) == 4
    with pytest.raises(TruncatedStreamError):
        ue_decode(BitReader(bits_to_bytes("00")))


def test_ue_decode_advances_exactly():
    r = BitReader(bits_to_bytes("00101" + "1" + "011"))
    assert ue_decode(r) == 4 and r.bitpos == 5
    assert ue_decode(r) == 0 and r.bitpos == 6
    assert se_decode(r) == -1 and r.bitpos == 9


def test_bit_length_examples():
    assert bit_length_se(0) == 1
    assert bit_length_se(-1) == 3
    assert bit_length_se(2) == 5
    assert bit_length_ue(4) == 5


def test_range_errors():
    w = BitWriter()
    with pytest.raises(CodingOverflowError):
        w.write_ue(-1)
    with pytest.raises(CodingOverflowError):
        w.write_ue((1 << 32) - 1)
    with pytest.raises(CodingOverflowError):
        w.write_se((1 << 30) + 1)
    w.write_se(1 << 30)
    w.write_se(-(1 << 30))
    w.write_ue((1 << 32) - 2)
    r = BitReader(w.getvalue())
    assert (r.read_se(), r.read_se(), r.read_ue()) == (1 << 30, -(1 << 30), (1 << 32) - 2)


def test_raw_bits():
    w = BitWriter()
    w.write_bits(5, 3)
    assert BitReader(w.getvalue()).read_bits(3) == 5
    w = BitWriter()
    for _ in range(8):
        w.write_bits(1, 1)
    assert w.getvalue() == b"\xff"
    r = BitReader(b"\xab")
    r.read_bits(6)
    with pytest.raises(TruncatedStreamError):
        r.read_bits(4)
    with pytest.raises(CodingOverflowError):
        BitWriter().write_bits(8, 3)


def test_padding_is_zero():
    w = BitWriter()
    w.write_bits(1, 1)
    assert w.getvalue() == b"\x80"
    assert w.bit_length == 1


def test_flags_longer_than_a_word():
    flags = [(k * 7) % 3 == 0 for k in range(68)]
    w = BitWriter()
    w.write_flags(flags)
    assert BitReader(w.getvalue()).read_flags(68) == tuple(int(f) for f in flags)


@given(st.lists(st.integers(-(1 << 30), 1 << 30), max_size=60), st.integers(0, 7))
def test_concatenation_any_alignment(values, lead):
    w = BitWriter()
    w.write_bits(0, lead)
    for v in values:
        w.write_se(v)
    assert w.to_bitstring() == "0" * lead + "".join(se_oracle(v) for v in values)
    r = BitReader(w.getvalue())
    r.read_bits(lead)
    assert [r.read_se() for _ in values] == values
    r2 = BitReader(w.getvalue(), lead)
    assert r2.read_se_array(len(values)).tolist() == values


def test_lengths_monotone_per_sign():
    pos = [bit_length_se(v) for v in range(0, 5000)]
    neg = [bit_length_se(-v) for v in range(0, 5000)]
    assert pos == sorted(pos) and neg == sorted(neg)


def test_read_se_array_truncation():
    r = BitReader(bits_to_bytes("010"))
    with pytest.raises(TruncatedStreamError):
        r.read_se_array(5)
