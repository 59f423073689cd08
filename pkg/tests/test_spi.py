import pytest

from fdlab.spi import (
    DEFAULT_SPI_CLOCK_HZ,
    LAYOUT_VERSION,
    SpiTarget,
    SpiWord,
    decode_word,
    encode_config,
    encode_word,
    hex_dump,
    transfer_time_us,
)


def test_layout_version_pinned():
    assert LAYOUT_VERSION == 1


# ---------------------------------------------------------- hand-coded

def test_att_word_bytes():
    # address byte 0x41, then the raw 7-bit code: 30 -> 0x1E
    w = encode_word(SpiTarget.ATT, 30)
    assert w.data == bytes([0x41, 0x1E])


def test_ps_word_bytes():
    # 16-bit frame: address nibble 0x5, mode 00, code<<2, pad 00.
    # code 110 -> frame 0x5000 | (110 << 2) = 0x51B8
    w = encode_word(SpiTarget.PS_DAC, 110)
    assert w.data == bytes([0x51, 0xB8])
    # full scale 255 -> 0x53FC
    assert encode_word(SpiTarget.PS_DAC, 255).data == bytes([0x53, 0xFC])
    assert encode_word(SpiTarget.PS_DAC, 0).data == bytes([0x50, 0x00])


def test_cap_word_bytes():
    # single byte: 1 | index(2 bits) | code(5 bits)
    assert encode_word(SpiTarget.CAP1, 16).data == bytes([0xB0])
    assert encode_word(SpiTarget.CAP2, 6).data == bytes([0xC6])
    assert encode_word(SpiTarget.CAP3, 6).data == bytes([0xE6])
    assert encode_word(SpiTarget.CAP1, 0).data == bytes([0xA0])
    assert encode_word(SpiTarget.CAP3, 31).data == bytes([0xFF])


def test_encode_range_checks():
    with pytest.raises(ValueError):
        encode_word(SpiTarget.ATT, 128)
    with pytest.raises(ValueError):
        encode_word(SpiTarget.PS_DAC, 256)
    with pytest.raises(ValueError):
        encode_word(SpiTarget.CAP2, 32)
    with pytest.raises(ValueError):
        encode_word(SpiTarget.ATT, -1)


# ----------------------------------------------------------- round trip

def test_round_trip_every_code():
    # distinct code space: 128 ATT + 256 PS + 32 shared cap codes = 416;
    # on the wire the cap space appears in three banks, so 480 words
    count = 0
    for code in range(128):
        w = encode_word(SpiTarget.ATT, code)
        back = decode_word(w.data)
        assert (back.target, back.code) == (SpiTarget.ATT, code)
        count += 1
    for code in range(256):
        back = decode_word(encode_word(SpiTarget.PS_DAC, code).data)
        assert (back.target, back.code) == (SpiTarget.PS_DAC, code)
        count += 1
    for target in (SpiTarget.CAP1, SpiTarget.CAP2, SpiTarget.CAP3):
        for code in range(32):
            back = decode_word(encode_word(target, code).data)
            assert (back.target, back.code) == (target, code)
            count += 1
    assert count == 480
    assert 128 + 256 + 32 == 416


def test_decode_rejects_garbage():
    with pytest.raises(ValueError):
        decode_word(b"")
    with pytest.raises(ValueError):
        decode_word(bytes([0x41, 0x1E, 0x00]))  # wrong length
    with pytest.raises(ValueError):
        decode_word(bytes([0x42, 0x00]))  # unknown address
    with pytest.raises(ValueError):
        decode_word(bytes([0x51, 0xB9]))  # pad bits set in a PS frame
    with pytest.raises(ValueError):
        decode_word(bytes([0x60]))  # single byte without the cap marker


def test_encode_config_order_and_content():
    words = encode_config(att=30, ps=110, caps=(16, 6, 6))
    assert [w.target for w in words] == [
        SpiTarget.ATT, SpiTarget.PS_DAC, SpiTarget.CAP1, SpiTarget.CAP2, SpiTarget.CAP3,
    ]
    assert [w.data.hex().upper() for w in words] == ["411E", "51B8", "B0", "C6", "E6"]


# -------------------------------------------------------------- timing

def test_transfer_times_exact():
    # 8 MHz clock: a byte is exactly 1 us on the wire
    att = encode_word(SpiTarget.ATT, 0)
    cap = encode_word(SpiTarget.CAP1, 0)
    assert transfer_time_us(att) == 2.0
    assert transfer_time_us(cap) == 1.0
    total = sum(transfer_time_us(w) for w in encode_config(30, 110, (16, 6, 6)))
    assert total == 7.0
    # slower clock scales linearly
    assert transfer_time_us(att, clock_hz=DEFAULT_SPI_CLOCK_HZ / 2) == 4.0


def test_hex_dump_format():
    words = encode_config(att=30, ps=110, caps=(16, 6, 6))
    assert hex_dump(words) == "41 1E\n51 B8\nB0\nC6\nE6\n"
    assert hex_dump(SpiWord(SpiTarget.ATT, 5, bytes([0x41, 0x05]))) == "41 05\n"
