"""SPI word encoding for the canceller box control registers.

Byte layout (LAYOUT_VERSION 1, all words big-endian):

* ATT (2 bytes): ``[0x41, code]`` with the 7-bit attenuator code in the
  low bits of the data byte.
* PS_DAC (2 bytes): the 8-bit phase DAC sample inside a 12-bit DAC
  frame (two mode bits 00, eight data bits, two pad bits 00), address
  nibble 0x5 in the top four bits: ``[0x50 | frame >> 8, frame & 0xFF]``
  with ``frame = code << 2``.
* CAP1..CAP3 (1 byte): ``0x80 | (index << 5) | code`` with the 5-bit
  capacitor code, so the three caps occupy 0xA0-, 0xC0- and 0xE0-based
  ranges.

Every encoding is reversible; ``decode_word(encode_word(t, c).data)``
returns ``(t, c)`` for all valid codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

LAYOUT_VERSION = 1
ATT_ADDRESS = 0x41
PS_ADDRESS_NIBBLE = 0x5
DEFAULT_SPI_CLOCK_HZ = 8e6


class SpiTarget(Enum):
    ATT = "att"
    PS_DAC = "ps_dac"
    CAP1 = "cap1"
    CAP2 = "cap2"
    CAP3 = "cap3"


_CODE_RANGE = {
    SpiTarget.ATT: 127,
    SpiTarget.PS_DAC: 255,
    SpiTarget.CAP1: 31,
    SpiTarget.CAP2: 31,
    SpiTarget.CAP3: 31,
}
_CAP_INDEX = {SpiTarget.CAP1: 1, SpiTarget.CAP2: 2, SpiTarget.CAP3: 3}


@dataclass(frozen=True)
class SpiWord:
    target: SpiTarget
    code: int
    data: bytes


def encode_word(target: SpiTarget, code: int) -> SpiWord:
    """Encode one register write; rejects codes outside the target's range."""
    limit = _CODE_RANGE[target]
    if not 0 <= code <= limit:
        raise ValueError(f"{target.value} code {code} outside 0..{limit}")
    if target is SpiTarget.ATT:
        data = bytes([ATT_ADDRESS, code & 0x7F])
    elif target is SpiTarget.PS_DAC:
        frame = code << 2  # mode bits 00 above, pad bits 00 below
        data = bytes([(PS_ADDRESS_NIBBLE << 4) | (frame >> 8), frame & 0xFF])
    else:
        data = bytes([0x80 | (_CAP_INDEX[target] << 5) | (code & 0x1F)])
    return SpiWord(target=target, code=code, data=data)


def decode_word(data: bytes) -> SpiWord:
    """Recover the word (target, code and raw bytes) from the bus bytes."""
    data = bytes(data)
    if len(data) == 1:
        b = data[0]
        if not b & 0x80:
            raise ValueError(f"not a CAP word: {b:#04x}")
        idx = (b >> 5) & 0x3
        for target, i in _CAP_INDEX.items():
            if i == idx:
                return SpiWord(target, b & 0x1F, data)
        raise ValueError(f"bad CAP index in word {b:#04x}")
    if len(data) == 2:
        if data[0] == ATT_ADDRESS:
            if data[1] & 0x80:
                raise ValueError(f"ATT code byte has the msb set: {data[1]:#04x}")
            return SpiWord(SpiTarget.ATT, data[1] & 0x7F, data)
        if data[0] >> 4 == PS_ADDRESS_NIBBLE:
            frame = ((data[0] & 0x0F) << 8) | data[1]
            if frame & 0xC03:  # mode or pad bits set
                raise ValueError(f"malformed DAC frame {frame:#05x}")
            return SpiWord(SpiTarget.PS_DAC, (frame >> 2) & 0xFF, data)
        raise ValueError(f"unknown 2-byte word address {data[0]:#04x}")
    raise ValueError(f"SPI words are 1 or 2 bytes, got {len(data)}")


def encode_config(att: int, ps: int, caps: tuple[int, int, int]) -> list[SpiWord]:
    """The five-word programming sequence: ATT, PS, CAP1, CAP2, CAP3."""
    if len(caps) != 3:
        raise ValueError(f"need exactly 3 cap codes, got {caps}")
    return [
        encode_word(SpiTarget.ATT, att),
        encode_word(SpiTarget.PS_DAC, ps),
        encode_word(SpiTarget.CAP1, caps[0]),
        encode_word(SpiTarget.CAP2, caps[1]),
        encode_word(SpiTarget.CAP3, caps[2]),
    ]


def transfer_time_us(words, clock_hz: float = DEFAULT_SPI_CLOCK_HZ) -> float:
    """Total bus time in microseconds at a given SPI clock."""
    if clock_hz <= 0:
        raise ValueError(f"clock must be positive, got {clock_hz}")
    if isinstance(words, SpiWord):
        words = [words]
    return sum(8.0 * len(w.data) * 1e6 / clock_hz for w in words)


def hex_dump(words) -> str:
    """One word per line, bytes as uppercase hex pairs."""
    if isinstance(words, SpiWord):
        words = [words]
    return "".join(" ".join(f"{b:02X}" for b in w.data) + "\n" for w in words)
