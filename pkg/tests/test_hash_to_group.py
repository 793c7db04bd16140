"""Tests for the hash into the group."""

import hashlib
import random

import pytest

from conjsig.errors import ClientError, MalformedLengthPrefixError
from conjsig.hash_to_group import HashParams, expand_digest, hash_to_group
from conjsig.platform_group import GroupElement, PlatformDescriptor, encode, identity
from conjsig.signature_core import Profile

TRIALS = 10_000
WIDE = HashParams.create(2**64, 2**64, b"conjsig/test")


def reference_expand(digest: bytes, bounds: list[int]) -> list[int]:
    """Straight transcription of the normative expansion."""
    sizes = [(2 * b + 1).bit_length() // 8 + 1 + 16 for b in bounds]
    stream = b""
    counter = 0
    while len(stream) < sum(sizes):
        stream += hashlib.sha256(digest + counter.to_bytes(4, "big")).digest()
        counter += 1
    values = []
    offset = 0
    for bound, size in zip(bounds, sizes):
        values.append(int.from_bytes(stream[offset : offset + size], "big") % (2 * bound + 1) - bound)
        offset += size
    return values


class TestHashParams:
    def test_toy_profile_params(self, toy_profile: Profile) -> None:
        params = toy_profile.hash_params
        assert params.digest_algorithm_id == "sha256"
        assert params.shift_bound == 8
        assert params.domain_tag == b"conjsig/v1"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"exponent_bound": 1, "shift_bound": 1, "domain_tag": b"t"},
            {"exponent_bound": 8, "shift_bound": 0, "domain_tag": b"t"},
            {"exponent_bound": 8, "shift_bound": 1, "domain_tag": b""},
            {"exponent_bound": 8, "shift_bound": 1, "domain_tag": b"t", "digest_algorithm_id": "md5"},
        ],
    )
    def test_invalid_params(self, kwargs: dict) -> None:
        with pytest.raises(ClientError):
            HashParams.create(**kwargs)

    def test_bytes_round_trip(self, toy_profile: Profile) -> None:
        params = toy_profile.hash_params
        assert HashParams.from_bytes(params.to_bytes()) == params


class TestExpandDigest:
    def test_all_zero_digest(self) -> None:
        assert expand_digest(bytes(32), 3, 8) == [0, -8, -6]

    def test_count_zero(self) -> None:
        assert expand_digest(b"\x01", 0, 8) == []

    def test_range(self, rng: random.Random) -> None:
        for _ in range(TRIALS):
            values = expand_digest(rng.randbytes(32), 3, 8)
            assert all(-8 <= v <= 8 for v in values)

    def test_large_bound_uses_many_blocks(self) -> None:
        digest = hashlib.sha256(b"large").digest()
        bound = 2**256
        values = expand_digest(digest, 4, bound)
        assert values == reference_expand(digest, [bound] * 4)
        assert values[0] == 73411298241408834392305558625250115368575469817258488537511000323370062272093
        assert values[3] == -98091723560192053269795366195277352981490670016453845528298828106553415693070

    def test_empty_digest_rejected(self) -> None:
        with pytest.raises(ClientError):
            expand_digest(b"", 1, 8)


class TestHashToGroup:
    def test_known_answer(self, toy_profile: Profile, desc: PlatformDescriptor) -> None:
        """H("abc" || f(identity)) under the toy profile."""
        y = encode(identity(desc))
        h = hash_to_group(b"abc", y, desc, toy_profile.hash_params)
        assert h == GroupElement((1672977186, 1097967387), -2)

    def test_matches_construction(self, toy_profile: Profile, desc: PlatformDescriptor) -> None:
        y = encode(GroupElement((-294, -217), 8))
        digest = hashlib.sha256(b"conjsig/v1" + b"abc" + y).digest()
        expected = reference_expand(digest, [2**32, 2**32, 8])
        h = hash_to_group(b"abc", y, desc, toy_profile.hash_params)
        assert h == GroupElement(tuple(expected[:2]), expected[2])
        assert h == GroupElement((37161146, 2168435474), 7)

    def test_deterministic(self, toy_profile: Profile, desc: PlatformDescriptor, rng: random.Random) -> None:
        y = encode(GroupElement((3, -4), 2))
        message = rng.randbytes(40)
        first = hash_to_group(message, y, desc, toy_profile.hash_params)
        assert first == hash_to_group(message, y, desc, toy_profile.hash_params)

    def test_distinct_messages(self, desc: PlatformDescriptor, rng: random.Random) -> None:
        y = encode(identity(desc))
        for i in range(TRIALS):
            m = rng.randbytes(16) + i.to_bytes(4, "big")
            m_prime = m + b"\x00"
            assert hash_to_group(m, y, desc, WIDE) != hash_to_group(m_prime, y, desc, WIDE)

    def test_avalanche(self, desc: PlatformDescriptor, rng: random.Random) -> None:
        y = encode(GroupElement((1, 2), 3))
        changed = 0
        for _ in range(TRIALS):
            message = bytearray(rng.randbytes(32))
            original = hash_to_group(bytes(message), y, desc, WIDE)
            bit = rng.randrange(len(message) * 8)
            message[bit // 8] ^= 1 << (bit % 8)
            changed += hash_to_group(bytes(message), y, desc, WIDE) != original
        assert changed >= 0.999 * TRIALS

    def test_domain_tag_separates(self, desc: PlatformDescriptor) -> None:
        y = encode(identity(desc))
        other = WIDE._replace(domain_tag=b"conjsig/other")
        assert hash_to_group(b"m", y, desc, WIDE) != hash_to_group(b"m", y, desc, other)

    def test_malformed_y(self, toy_profile: Profile, desc: PlatformDescriptor) -> None:
        y = encode(identity(desc))[:-2]
        with pytest.raises(MalformedLengthPrefixError):
            hash_to_group(b"abc", y, desc, toy_profile.hash_params)
