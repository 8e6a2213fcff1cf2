from __future__ import annotations

from typing import TYPE_CHECKING

from bitarray import bitarray, frozenbitarray
from bitarray.util import ba2hex, ba2int, hex2ba, int2ba, zeros

from dissect.adjacency.exceptions import CorruptLabelError, FieldOverflowError, PaddingError

if TYPE_CHECKING:
    from collections.abc import Iterator


class BitString:
    """Immutable bit string used for all labels.

    Fields are stored big-endian, so the lexicographic order of two labels with the same layout mirrors the numeric
    order of their fields.

    Args:
        bits: The initial bits, either a bitarray or a string of ``0`` and ``1`` characters.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: bitarray | str = ""):
        self._bits = bits if isinstance(bits, frozenbitarray) else frozenbitarray(bits, endian="big")

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, item: int | slice) -> int | BitString:
        if isinstance(item, slice):
            return BitString(self._bits[item])
        return self._bits[item]

    def __add__(self, other: BitString) -> BitString:
        return BitString(self._bits + other._bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __str__(self) -> str:
        return self._bits.to01()

    def __repr__(self) -> str:
        return f"<BitString {self.to_hex()}>"

    @property
    def bits(self) -> frozenbitarray:
        """Return the underlying immutable bitarray."""
        return self._bits

    def append_field(self, value: int, width: int) -> BitString:
        """Return a new bit string with ``value`` appended as a big-endian field of ``width`` bits.

        Args:
            value: The non-negative integer to append.
            width: The field width in bits.

        Raises:
            FieldOverflowError: If the value does not fit in the field.
        """
        if value < 0 or value >= (1 << width):
            raise FieldOverflowError(f"Value {value} does not fit in {width} bits")

        if width == 0:
            return self
        return BitString(self._bits + int2ba(value, length=width, endian="big"))

    def read_field(self, offset: int, width: int) -> int:
        """Read a big-endian field of ``width`` bits starting at bit ``offset``.

        Args:
            offset: The bit offset of the field.
            width: The field width in bits.

        Raises:
            CorruptLabelError: If the field extends past the end of the bit string.
        """
        if offset < 0 or offset + width > len(self._bits):
            raise CorruptLabelError(f"Field of {width} bits at offset {offset} exceeds bit string of {len(self)} bits")

        if width == 0:
            return 0
        return ba2int(self._bits[offset : offset + width])

    def pad_unambiguous(self, target: int) -> BitString:
        """Pad to exactly ``target`` bits with a single ``1`` marker followed by zeros.

        Args:
            target: The padded length in bits.

        Raises:
            PaddingError: If there is no room for the marker bit.
        """
        if len(self._bits) >= target:
            raise PaddingError(f"Cannot pad {len(self)} bits to {target} bits")

        padding = zeros(target - len(self._bits), endian="big")
        padding[0] = 1
        return BitString(self._bits + padding)

    def strip_padding(self) -> BitString:
        """Remove the padding added by :meth:`pad_unambiguous`.

        Raises:
            PaddingError: If the bit string contains no marker bit.
        """
        try:
            marker = len(self._bits) - 1 - self._bits[::-1].index(1)
        except ValueError:
            raise PaddingError("No padding marker found")

        return BitString(self._bits[:marker])

    def to_hex(self) -> str:
        """Serialize as ``<bitlen>:<hex>``, left-aligned in nibbles and zero-filled on the right."""
        padded = bitarray(self._bits, endian="big")
        padded.extend(zeros(-len(padded) % 4, endian="big"))
        return f"{len(self._bits)}:{ba2hex(padded) if padded else ''}"

    @classmethod
    def from_hex(cls, text: str) -> BitString:
        """Parse the ``<bitlen>:<hex>`` serialization.

        Args:
            text: The serialized bit string.

        Raises:
            CorruptLabelError: If the text is not a valid serialization.
        """
        length, sep, digits = text.strip().partition(":")
        if not sep or not (length.isascii() and length.isdigit()):
            raise CorruptLabelError(f"Invalid bit string serialization: {text!r}")

        bitlen = int(length)
        if len(digits) != (bitlen + 3) // 4:
            raise CorruptLabelError(f"Expected {(bitlen + 3) // 4} hex digits for {bitlen} bits, got {len(digits)}")

        if bitlen == 0:
            return cls()

        try:
            bits = hex2ba(digits, endian="big")
        except ValueError:
            raise CorruptLabelError(f"Invalid hex digits: {digits!r}")

        if bits[bitlen:].any():
            raise CorruptLabelError(f"Non-zero fill bits in {text!r}")

        return cls(bits[:bitlen])

    def to_bytes(self) -> bytes:
        """Return the bits packed big-endian into bytes, zero-filled on the right."""
        return self._bits.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, bitlen: int) -> BitString:
        """Unpack ``bitlen`` bits from bytes produced by :meth:`to_bytes`.

        Args:
            data: The packed bytes.
            bitlen: The number of bits to unpack.

        Raises:
            CorruptLabelError: If there are not enough bytes.
        """
        if len(data) * 8 < bitlen:
            raise CorruptLabelError(f"Need {bitlen} bits but only {len(data) * 8} are available")

        bits = bitarray(endian="big")
        bits.frombytes(data)
        return cls(bits[:bitlen])
