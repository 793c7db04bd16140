import pytest

from conjsig.codec import RecordReader, RecordWriter, int_from_bytes, int_to_bytes
from conjsig.errors import MalformedHeaderError, MalformedLengthPrefixError, TrailingBytesError


@pytest.mark.parametrize(
    ("value", "encoded"),
    [
        (0, "00"),
        (1, "01"),
        (-1, "ff"),
        (127, "7f"),
        (128, "0080"),
        (-128, "80"),
        (-129, "ff7f"),
        (2**64, "010000000000000000"),
    ],
)
def test_minimal_twos_complement(value: int, encoded: str) -> None:
    assert int_to_bytes(value).hex() == encoded
    assert int_from_bytes(bytes.fromhex(encoded)) == value


@pytest.mark.parametrize("raw", ["", "0001", "ff80", "0000"])
def test_non_minimal_integers_rejected(raw: str) -> None:
    with pytest.raises(MalformedLengthPrefixError):
        int_from_bytes(bytes.fromhex(raw))


class TestRecordReader:
    def test_fields_in_order(self) -> None:
        data = RecordWriter(b"HD").put_bytes(b"abc").put_int(-5).put_raw(b"\x07").getvalue()
        reader = RecordReader(data)
        reader.expect_header(b"HD")
        assert reader.take_bytes() == b"abc"
        assert reader.take_int() == -5
        assert reader.take_raw(1) == b"\x07"
        reader.expect_end()

    def test_wrong_header(self) -> None:
        with pytest.raises(MalformedHeaderError):
            RecordReader(b"XY\x00").expect_header(b"HD")

    def test_length_past_end(self) -> None:
        with pytest.raises(MalformedLengthPrefixError):
            RecordReader(b"\x00\x00\x00\x05abc").take_bytes()

    def test_trailing_bytes(self) -> None:
        reader = RecordReader(RecordWriter().put_int(3).getvalue() + b"\x00")
        reader.take_int()
        with pytest.raises(TrailingBytesError):
            reader.expect_end()
