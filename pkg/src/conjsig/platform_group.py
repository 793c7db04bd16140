"""Exact arithmetic in Z^n x|_A Z.

Elements are pairs (v, k) with the law (v1, k1)(v2, k2) = (v1 + A^k1 v2, k1 + k2).
The pair is its own normal form, so equality of elements is equality of fields.
Conjugation is the right action g^h = h^-1 g h.
"""
import hashlib
import random
from collections.abc import Iterable
from typing import NamedTuple, TypeVar

from conjsig.codec import RecordReader, RecordWriter
from conjsig.errors import (
    ClientError,
    DimensionMismatchError,
    MalformedHeaderError,
    PreconditionError,
)
from conjsig.logs import logger
from conjsig.matrix import (
    IntMatrix,
    IntVector,
    determinant,
    mat_vec,
    matrix_power,
    max_entry,
    to_matrix,
)

ELEMENT_MAGIC = b"\x47\x45"
ELEMENT_VERSION = 0x01
DESCRIPTOR_ID_SIZE = 8
CENTRALIZER_POWER_BOUND = 8

PlatformDescriptorSelf = TypeVar("PlatformDescriptorSelf", bound="PlatformDescriptor")


class PlatformDescriptor(NamedTuple):
    dimension: int
    action: IntMatrix
    sample_bound: int
    shift_bound: int
    descriptor_id: bytes

    @classmethod
    def create(
        cls: type["PlatformDescriptor"],
        action: list[list[int]] | IntMatrix,
        sample_bound: int,
        shift_bound: int,
    ) -> "PlatformDescriptor":
        matrix = to_matrix(action)
        dimension = len(matrix)
        if dimension < 1 or any(len(row) != dimension for row in matrix):
            raise ClientError(str(action), "action must be a non-empty square matrix")
        if abs(determinant(matrix)) != 1:
            raise ClientError(str(action), "action determinant must be +1 or -1")
        if sample_bound < 2:  # noqa: PLR2004
            raise ClientError(str(sample_bound), "sample_bound must be at least 2")
        if shift_bound < 1:
            raise ClientError(str(shift_bound), "shift_bound must be at least 1")
        body = _descriptor_body(dimension, matrix, sample_bound, shift_bound)
        return PlatformDescriptor(
            dimension=dimension,
            action=matrix,
            sample_bound=sample_bound,
            shift_bound=shift_bound,
            descriptor_id=hashlib.sha256(b"conjsig/descriptor" + body).digest()[
                :DESCRIPTOR_ID_SIZE
            ],
        )

    def to_bytes(self: PlatformDescriptorSelf) -> bytes:
        return _descriptor_body(
            self.dimension,
            self.action,
            self.sample_bound,
            self.shift_bound,
        )

    @classmethod
    def from_bytes(cls: type["PlatformDescriptor"], data: bytes) -> "PlatformDescriptor":
        reader = RecordReader(data)
        dimension = reader.take_int()
        if dimension < 1:
            raise ClientError(str(dimension), "descriptor dimension must be positive")
        action = [[reader.take_int() for _ in range(dimension)] for _ in range(dimension)]
        sample_bound = reader.take_int()
        shift_bound = reader.take_int()
        reader.expect_end()
        return cls.create(action, sample_bound, shift_bound)


def _descriptor_body(
    dimension: int,
    action: IntMatrix,
    sample_bound: int,
    shift_bound: int,
) -> bytes:
    writer = RecordWriter().put_int(dimension)
    for row in action:
        for entry in row:
            writer.put_int(entry)
    return writer.put_int(sample_bound).put_int(shift_bound).getvalue()


class GroupElement(NamedTuple):
    translation: IntVector
    shift: int


def _check(a: GroupElement, desc: PlatformDescriptor) -> None:
    if len(a.translation) != desc.dimension:
        raise DimensionMismatchError(
            str(a),
            f"element has dimension {len(a.translation)}, "
            f"descriptor has {desc.dimension}",
        )


def identity(desc: PlatformDescriptor) -> GroupElement:
    return GroupElement((0,) * desc.dimension, 0)


def is_identity(a: GroupElement) -> bool:
    return a.shift == 0 and not any(a.translation)


def multiply(a: GroupElement, b: GroupElement, desc: PlatformDescriptor) -> GroupElement:
    _check(a, desc)
    _check(b, desc)
    moved = mat_vec(matrix_power(desc.action, a.shift), b.translation)
    return GroupElement(
        tuple(x + y for x, y in zip(a.translation, moved)),
        a.shift + b.shift,
    )


def product(elements: Iterable[GroupElement], desc: PlatformDescriptor) -> GroupElement:
    result = identity(desc)
    for element in elements:
        result = multiply(result, element, desc)
    return result


def inverse(a: GroupElement, desc: PlatformDescriptor) -> GroupElement:
    _check(a, desc)
    moved = mat_vec(matrix_power(desc.action, -a.shift), a.translation)
    return GroupElement(tuple(-x for x in moved), -a.shift)


def conjugate(g: GroupElement, h: GroupElement, desc: PlatformDescriptor) -> GroupElement:
    return product((inverse(h, desc), g, h), desc)


def commutes(a: GroupElement, b: GroupElement, desc: PlatformDescriptor) -> bool:
    return multiply(a, b, desc) == multiply(b, a, desc)


def power(g: GroupElement, e: int, desc: PlatformDescriptor) -> GroupElement:
    _check(g, desc)
    if e < 0:
        return power(inverse(g, desc), -e, desc)
    result = identity(desc)
    base = g
    while e:
        if e & 1:
            result = multiply(result, base, desc)
        e >>= 1
        if e:
            base = multiply(base, base, desc)
    return result


def random_element(desc: PlatformDescriptor, rng: random.Random) -> GroupElement:
    bound = desc.sample_bound
    translation = tuple(rng.randint(-bound, bound) for _ in range(desc.dimension))
    return GroupElement(translation, rng.randint(-desc.shift_bound, desc.shift_bound))


def encode(g: GroupElement) -> bytes:
    """The mapping f: canonical, injective and prefix-free."""
    header = (
        ELEMENT_MAGIC
        + bytes([ELEMENT_VERSION])
        + len(g.translation).to_bytes(2, "big")
    )
    writer = RecordWriter(header)
    for coordinate in g.translation:
        writer.put_int(coordinate)
    return writer.put_int(g.shift).getvalue()


def decode_prefix(
    data: bytes,
    desc: PlatformDescriptor,
    offset: int = 0,
) -> tuple[GroupElement, int]:
    reader = RecordReader(data, offset)
    reader.expect_header(ELEMENT_MAGIC)
    version = reader.take_raw(1)[0]
    if version != ELEMENT_VERSION:
        raise MalformedHeaderError(str(version), "unsupported element version")
    dimension = int.from_bytes(reader.take_raw(2), "big")
    if dimension != desc.dimension:
        raise DimensionMismatchError(
            str(dimension),
            f"encoded dimension differs from descriptor dimension {desc.dimension}",
        )
    translation = tuple(reader.take_int() for _ in range(dimension))
    shift = reader.take_int()
    return GroupElement(translation, shift), reader.offset


def decode(data: bytes, desc: PlatformDescriptor) -> GroupElement:
    element, offset = decode_prefix(data, desc)
    RecordReader(data, offset).expect_end()
    return element


def centralizer_check(
    g: GroupElement,
    desc: PlatformDescriptor,
    rng: random.Random,
    samples: int,
) -> list[GroupElement]:
    """Sampled elements that commute with g without being a small power of g.

    An empty result means the centralizer looks like <g> at this sample size.
    """
    if is_identity(g):
        raise PreconditionError(str(g), "centralizer check needs g != identity")
    own_powers = {
        power(g, e, desc)
        for e in range(-CENTRALIZER_POWER_BOUND, CENTRALIZER_POWER_BOUND + 1)
    }
    offending = []
    for _ in range(samples):
        h = random_element(desc, rng)
        if h not in own_powers and commutes(h, g, desc):
            offending.append(h)
    if offending:
        logger.debug(
            "centralizer check found commuting elements",
            extra={"count": len(offending), "samples": samples},
        )
    return offending


def has_exponential_growth(desc: PlatformDescriptor) -> bool:
    return max_entry(matrix_power(desc.action, 8)) > max_entry(
        matrix_power(desc.action, 4),
    )


def generators(desc: PlatformDescriptor) -> list[GroupElement]:
    result = []
    for i in range(desc.dimension):
        unit = tuple(int(i == j) for j in range(desc.dimension))
        result.append(GroupElement(unit, 0))
        result.append(GroupElement(tuple(-x for x in unit), 0))
    zero = (0,) * desc.dimension
    result.extend([GroupElement(zero, 1), GroupElement(zero, -1)])
    return result


def ball_sizes(desc: PlatformDescriptor, radius: int) -> list[int]:
    """Number of distinct elements that are products of at most r generators."""
    gens = generators(desc)
    seen = {identity(desc)}
    frontier = set(seen)
    sizes = [1]
    for _ in range(radius):
        frontier = {
            multiply(element, gen, desc) for element in frontier for gen in gens
        } - seen
        seen |= frontier
        sizes.append(len(seen))
    return sizes


def growth_ratios(desc: PlatformDescriptor, radius: int) -> list[float]:
    sizes = ball_sizes(desc, radius)
    return [sizes[r] / sizes[r - 1] for r in range(1, radius + 1)]
