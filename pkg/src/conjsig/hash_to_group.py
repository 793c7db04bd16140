"""The hash H into the platform group: digest, then counter-mode expansion."""
import hashlib
from collections.abc import Sequence
from typing import NamedTuple, TypeVar

from conjsig.codec import RecordReader, RecordWriter
from conjsig.errors import ClientError
from conjsig.platform_group import GroupElement, PlatformDescriptor, decode

DIGEST_ALGORITHM_ID = "sha256"
OVERSAMPLE_BYTES = 16
COUNTER_SIZE = 4

HashParamsSelf = TypeVar("HashParamsSelf", bound="HashParams")


class HashParams(NamedTuple):
    digest_algorithm_id: str
    exponent_bound: int
    shift_bound: int
    domain_tag: bytes

    @classmethod
    def create(
        cls: type["HashParams"],
        exponent_bound: int,
        shift_bound: int,
        domain_tag: bytes,
        digest_algorithm_id: str = DIGEST_ALGORITHM_ID,
    ) -> "HashParams":
        if digest_algorithm_id != DIGEST_ALGORITHM_ID:
            raise ClientError(digest_algorithm_id, "unsupported digest algorithm")
        if exponent_bound < 2:  # noqa: PLR2004
            raise ClientError(str(exponent_bound), "exponent_bound must be at least 2")
        if shift_bound < 1:
            raise ClientError(str(shift_bound), "shift_bound must be at least 1")
        if not domain_tag:
            raise ClientError(repr(domain_tag), "domain_tag must not be empty")
        return HashParams(digest_algorithm_id, exponent_bound, shift_bound, domain_tag)

    def to_bytes(self: HashParamsSelf) -> bytes:
        return (
            RecordWriter()
            .put_bytes(self.digest_algorithm_id.encode("ascii"))
            .put_int(self.exponent_bound)
            .put_int(self.shift_bound)
            .put_bytes(self.domain_tag)
            .getvalue()
        )

    @classmethod
    def from_bytes(cls: type["HashParams"], data: bytes) -> "HashParams":
        reader = RecordReader(data)
        algorithm = reader.take_bytes().decode("ascii", errors="replace")
        exponent_bound = reader.take_int()
        shift_bound = reader.take_int()
        domain_tag = reader.take_bytes()
        reader.expect_end()
        return cls.create(exponent_bound, shift_bound, domain_tag, algorithm)


def _digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def _stream(digest: bytes, size: int) -> bytes:
    blocks = []
    produced = 0
    counter = 0
    while produced < size:
        block = _digest(digest + counter.to_bytes(COUNTER_SIZE, "big"))
        blocks.append(block)
        produced += len(block)
        counter += 1
    return b"".join(blocks)[:size]


def _chunk_size(bound: int) -> int:
    return (2 * bound + 1).bit_length() // 8 + 1 + OVERSAMPLE_BYTES


def expand_bounded(digest: bytes, bounds: Sequence[int]) -> list[int]:
    if not digest:
        raise ClientError("", "digest must not be empty")
    sizes = [_chunk_size(bound) for bound in bounds]
    stream = _stream(digest, sum(sizes))
    values = []
    offset = 0
    for bound, size in zip(bounds, sizes):
        chunk = int.from_bytes(stream[offset : offset + size], "big")
        values.append(chunk % (2 * bound + 1) - bound)
        offset += size
    return values


def expand_digest(digest: bytes, count: int, bound: int) -> list[int]:
    return expand_bounded(digest, [bound] * count)


def hash_to_group(
    message: bytes,
    y_encoded: bytes,
    desc: PlatformDescriptor,
    params: HashParams,
) -> GroupElement:
    """H(m || f(y)); f is prefix-free so the concatenation needs no framing."""
    decode(y_encoded, desc)
    digest = _digest(params.domain_tag + message + y_encoded)
    values = expand_bounded(
        digest,
        [params.exponent_bound] * desc.dimension + [params.shift_bound],
    )
    return GroupElement(tuple(values[:-1]), values[-1])
