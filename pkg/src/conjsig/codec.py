"""Length-prefixed record framing shared by the element, key and ledger formats.

Every field is a 4-byte big-endian length followed by that many bytes.
Integers are minimal big-endian two's complement; zero is a single 0x00 byte.
"""
from typing import TypeVar

from conjsig.errors import (
    MalformedHeaderError,
    MalformedLengthPrefixError,
    TrailingBytesError,
)

LENGTH_SIZE = 4

RecordWriterSelf = TypeVar("RecordWriterSelf", bound="RecordWriter")
RecordReaderSelf = TypeVar("RecordReaderSelf", bound="RecordReader")


def int_to_bytes(value: int) -> bytes:
    magnitude = value if value >= 0 else ~value
    return value.to_bytes(magnitude.bit_length() // 8 + 1, "big", signed=True)


def int_from_bytes(data: bytes) -> int:
    if len(data) == 0 or int_to_bytes(int.from_bytes(data, "big", signed=True)) != data:
        raise MalformedLengthPrefixError(data.hex(), "non-minimal integer record")
    return int.from_bytes(data, "big", signed=True)


class RecordWriter:
    def __init__(self: RecordWriterSelf, header: bytes = b"") -> None:
        self._parts = [header]

    def put_bytes(self: RecordWriterSelf, data: bytes) -> RecordWriterSelf:
        self._parts.append(len(data).to_bytes(LENGTH_SIZE, "big"))
        self._parts.append(data)
        return self

    def put_int(self: RecordWriterSelf, value: int) -> RecordWriterSelf:
        return self.put_bytes(int_to_bytes(value))

    def put_raw(self: RecordWriterSelf, data: bytes) -> RecordWriterSelf:
        self._parts.append(data)
        return self

    def getvalue(self: RecordWriterSelf) -> bytes:
        return b"".join(self._parts)


class RecordReader:
    def __init__(self: RecordReaderSelf, data: bytes, offset: int = 0) -> None:
        self.data = data
        self.offset = offset

    def expect_header(self: RecordReaderSelf, header: bytes) -> None:
        found = self.data[self.offset : self.offset + len(header)]
        if found != header:
            raise MalformedHeaderError(found.hex(), f"expected header {header.hex()}")
        self.offset += len(header)

    def take_raw(self: RecordReaderSelf, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise MalformedLengthPrefixError(
                str(self.offset),
                f"record needs {size} bytes but only "
                f"{len(self.data) - self.offset} remain",
            )
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def take_bytes(self: RecordReaderSelf) -> bytes:
        size = int.from_bytes(self.take_raw(LENGTH_SIZE), "big")
        return self.take_raw(size)

    def take_int(self: RecordReaderSelf) -> int:
        return int_from_bytes(self.take_bytes())

    def at_end(self: RecordReaderSelf) -> bool:
        return self.offset == len(self.data)

    def expect_end(self: RecordReaderSelf) -> None:
        if not self.at_end():
            raise TrailingBytesError(
                str(self.offset),
                f"{len(self.data) - self.offset} trailing bytes",
            )
