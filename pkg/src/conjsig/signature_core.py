import hashlib
import random
from enum import Enum
from typing import NamedTuple, TypeVar

from sympy import divisors, factorint, isprime

from conjsig.codec import RecordReader, RecordWriter
from conjsig.errors import (
    ClientError,
    DimensionMismatchError,
    FactorizationsExhaustedError,
    MalformedHeaderError,
    ScreeningError,
)
from conjsig.hash_to_group import HashParams, hash_to_group
from conjsig.ledger import FactorLedger, RecordResult
from conjsig.logs import logger
from conjsig.parameter import parameter
from conjsig.platform_group import (
    GroupElement,
    PlatformDescriptor,
    centralizer_check,
    conjugate,
    decode,
    encode,
    has_exponential_growth,
    inverse,
    is_identity,
    multiply,
    power,
    product,
    random_element,
)

FILE_MAGIC = b"\x4e\x53"
FILE_VERSION = 0x01
PUBLIC_KEY_TYPE = 0x01
PRIVATE_KEY_TYPE = 0x02
SIGNATURE_TYPE = 0x03
PRIVATE_KEY_WARNING = b"CONJSIG PRIVATE KEY - UNENCRYPTED - DO NOT SHARE"
KEY_ID_SIZE = 16
TRIVIAL_FACTOR = 1
SIGN_RETRIES = 8

FactorPolicySelf = TypeVar("FactorPolicySelf", bound="FactorPolicy")
PublicKeySelf = TypeVar("PublicKeySelf", bound="PublicKey")
PrivateKeySelf = TypeVar("PrivateKeySelf", bound="PrivateKey")
SignatureSelf = TypeVar("SignatureSelf", bound="Signature")


def _header(record_type: int) -> bytes:
    return FILE_MAGIC + bytes([record_type, FILE_VERSION])


def _open(data: bytes, record_type: int) -> RecordReader:
    reader = RecordReader(data)
    reader.expect_header(_header(record_type))
    return reader


class FactorPolicy(NamedTuple):
    min_nj: int = 2
    excluded_primes: frozenset[int] = frozenset()
    max_exponent_in_nj: tuple[tuple[int, int], ...] = ()
    max_uses: int | None = None

    @classmethod
    def from_dict(cls: type["FactorPolicy"], raw: dict) -> "FactorPolicy":
        return FactorPolicy(
            min_nj=raw.get("min_nj", 2),
            excluded_primes=frozenset(raw.get("excluded_primes", [])),
            max_exponent_in_nj=tuple(sorted(raw.get("max_exponent_in_nj", {}).items())),
            max_uses=raw.get("max_uses"),
        )

    def allows(self: FactorPolicySelf, n_j: int) -> bool:
        if n_j < self.min_nj:
            return False
        caps = dict(self.max_exponent_in_nj)
        for prime, exponent in factorint(n_j).items():
            if prime in self.excluded_primes:
                return False
            if exponent > caps.get(prime, exponent):
                return False
        return True

    def write(self: FactorPolicySelf, writer: RecordWriter) -> None:
        writer.put_int(self.min_nj).put_int(len(self.excluded_primes))
        for prime in sorted(self.excluded_primes):
            writer.put_int(prime)
        writer.put_int(len(self.max_exponent_in_nj))
        for prime, cap in self.max_exponent_in_nj:
            writer.put_int(prime).put_int(cap)
        writer.put_int(-1 if self.max_uses is None else self.max_uses)

    @classmethod
    def read(cls: type["FactorPolicy"], reader: RecordReader) -> "FactorPolicy":
        min_nj = reader.take_int()
        excluded = frozenset(reader.take_int() for _ in range(reader.take_int()))
        caps = tuple(
            (reader.take_int(), reader.take_int()) for _ in range(reader.take_int())
        )
        max_uses = reader.take_int()
        return FactorPolicy(min_nj, excluded, caps, None if max_uses < 0 else max_uses)


class Profile(NamedTuple):
    name: str
    descriptor: PlatformDescriptor
    hash_params: HashParams
    factorization: tuple[tuple[int, int], ...]
    policy: FactorPolicy
    centralizer_samples: int
    setup_retries: int

    @classmethod
    def from_name(cls: type["Profile"], name: str) -> "Profile":
        try:
            raw = parameter["profile"][name]
        except KeyError as e:
            raise ClientError(name, "unknown profile") from e
        return Profile(
            name=name,
            descriptor=PlatformDescriptor.create(
                raw["action"],
                raw["sample_bound"],
                raw["shift_bound"],
            ),
            hash_params=HashParams.create(**raw["hash"]),
            factorization=tuple(sorted(raw["factorization"].items())),
            policy=FactorPolicy.from_dict(raw["policy"]),
            centralizer_samples=raw["centralizer_samples"],
            setup_retries=raw["setup_retries"],
        )


class PublicKey(NamedTuple):
    x: GroupElement
    descriptor: PlatformDescriptor
    hash_params: HashParams
    key_id: bytes

    def to_bytes(self: PublicKeySelf) -> bytes:
        return (
            RecordWriter(_header(PUBLIC_KEY_TYPE))
            .put_bytes(self.key_id)
            .put_bytes(self.descriptor.to_bytes())
            .put_bytes(self.hash_params.to_bytes())
            .put_bytes(encode(self.x))
            .getvalue()
        )

    @classmethod
    def from_bytes(cls: type["PublicKey"], data: bytes) -> "PublicKey":
        reader = _open(data, PUBLIC_KEY_TYPE)
        key_id = reader.take_bytes()
        descriptor = PlatformDescriptor.from_bytes(reader.take_bytes())
        hash_params = HashParams.from_bytes(reader.take_bytes())
        x = decode(reader.take_bytes(), descriptor)
        reader.expect_end()
        return PublicKey(x, descriptor, hash_params, key_id)


class PrivateKey(NamedTuple):
    s: GroupElement
    g: GroupElement
    n: int
    factorization: tuple[tuple[int, int], ...]
    policy: FactorPolicy
    key_id: bytes
    descriptor: PlatformDescriptor
    hash_params: HashParams

    def public_key(self: PrivateKeySelf) -> PublicKey:
        x = conjugate(power(self.g, self.n, self.descriptor), self.s, self.descriptor)
        return PublicKey(x, self.descriptor, self.hash_params, self.key_id)

    def matches(self: PrivateKeySelf, pk: PublicKey) -> bool:
        return (
            self.key_id == pk.key_id
            and self.descriptor == pk.descriptor
            and self.hash_params == pk.hash_params
        )

    def to_bytes(self: PrivateKeySelf) -> bytes:
        writer = (
            RecordWriter(_header(PRIVATE_KEY_TYPE))
            .put_bytes(PRIVATE_KEY_WARNING)
            .put_bytes(self.key_id)
            .put_bytes(self.descriptor.to_bytes())
            .put_bytes(self.hash_params.to_bytes())
            .put_bytes(encode(self.s))
            .put_bytes(encode(self.g))
            .put_int(self.n)
            .put_int(len(self.factorization))
        )
        for prime, exponent in self.factorization:
            writer.put_int(prime).put_int(exponent)
        self.policy.write(writer)
        return writer.getvalue()

    @classmethod
    def from_bytes(cls: type["PrivateKey"], data: bytes) -> "PrivateKey":
        reader = _open(data, PRIVATE_KEY_TYPE)
        warning = reader.take_bytes()
        if warning != PRIVATE_KEY_WARNING:
            raise MalformedHeaderError(warning.hex(), "missing private key warning")
        key_id = reader.take_bytes()
        descriptor = PlatformDescriptor.from_bytes(reader.take_bytes())
        hash_params = HashParams.from_bytes(reader.take_bytes())
        s = decode(reader.take_bytes(), descriptor)
        g = decode(reader.take_bytes(), descriptor)
        n = reader.take_int()
        factorization = tuple(
            (reader.take_int(), reader.take_int()) for _ in range(reader.take_int())
        )
        policy = FactorPolicy.read(reader)
        reader.expect_end()
        sk = PrivateKey(s, g, n, factorization, policy, key_id, descriptor, hash_params)
        _check_private_key(sk)
        return sk


class Signature(NamedTuple):
    y: GroupElement
    alpha: GroupElement
    n_j: int

    def to_bytes(self: SignatureSelf) -> bytes:
        return (
            RecordWriter(_header(SIGNATURE_TYPE))
            .put_bytes(encode(self.y))
            .put_bytes(encode(self.alpha))
            .put_int(self.n_j)
            .getvalue()
        )

    @classmethod
    def from_bytes(
        cls: type["Signature"],
        data: bytes,
        desc: PlatformDescriptor,
    ) -> "Signature":
        reader = _open(data, SIGNATURE_TYPE)
        y = decode(reader.take_bytes(), desc)
        alpha = decode(reader.take_bytes(), desc)
        n_j = reader.take_int()
        reader.expect_end()
        return Signature(y, alpha, n_j)

    def fingerprint(self: SignatureSelf) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()


class RejectReason(Enum):
    EQUATION_FAILED = "EquationFailed"
    REPLAYED_FACTOR = "ReplayedFactor"
    MALFORMED = "Malformed"


class Verdict(NamedTuple):
    accepted: bool
    reason: RejectReason | None = None

    @classmethod
    def accept(cls: type["Verdict"]) -> "Verdict":
        return Verdict(accepted=True)

    @classmethod
    def reject(cls: type["Verdict"], reason: RejectReason) -> "Verdict":
        return Verdict(accepted=False, reason=reason)


def _n_from(factorization: tuple[tuple[int, int], ...]) -> int:
    n = 1
    for prime, exponent in factorization:
        n *= prime**exponent
    return n


def _check_private_key(sk: PrivateKey) -> None:
    if any(not isprime(p) or e < 1 for p, e in sk.factorization):
        raise ClientError(str(sk.factorization), "factorization must use primes")
    if _n_from(sk.factorization) != sk.n:
        raise ClientError(str(sk.n), "n does not match its factorization")
    # at least two distinct factorizations n = n_i * n_j
    if sk.n < 4 or len(divisors(sk.n)) < 3:  # noqa: PLR2004
        raise ClientError(str(sk.n), "n must be composite")
    if is_identity(sk.s):
        raise ClientError(str(sk.s), "s must not be the identity")
    if not admissible_divisors(sk):
        raise ClientError(str(sk.policy), "policy leaves no admissible n_j")


def admissible_divisors(sk: PrivateKey) -> list[int]:
    return [d for d in divisors(sk.n) if sk.policy.allows(d)]


def setup(
    desc: PlatformDescriptor,
    hash_params: HashParams,
    profile: Profile,
    rng: random.Random,
) -> tuple[PublicKey, PrivateKey]:
    if not has_exponential_growth(desc):
        raise ScreeningError(str(desc.action), "action has no exponential growth")
    for attempt in range(profile.setup_retries):
        g = random_element(desc, rng)
        if is_identity(g):
            continue
        if not centralizer_check(g, desc, rng, profile.centralizer_samples):
            break
    else:
        raise ScreeningError(
            str(desc.action),
            f"no element with small centralizer after {profile.setup_retries} tries",
        )
    for _ in range(profile.setup_retries):
        s = random_element(desc, rng)
        if not is_identity(s):
            break
    else:
        raise ScreeningError(str(desc.action), "could not draw a non-trivial s")
    sk = PrivateKey(
        s=s,
        g=g,
        n=_n_from(profile.factorization),
        factorization=profile.factorization,
        policy=profile.policy,
        key_id=rng.randbytes(KEY_ID_SIZE),
        descriptor=desc,
        hash_params=hash_params,
    )
    _check_private_key(sk)
    pk = sk.public_key()
    logger.info(
        "key pair created",
        extra={
            "key_id": sk.key_id.hex(),
            "profile": profile.name,
            "centralizer_attempts": attempt + 1,
        },
    )
    return pk, sk


def rekey(
    old_sk: PrivateKey,
    desc: PlatformDescriptor,
    profile: Profile,
    rng: random.Random,
) -> tuple[PublicKey, PrivateKey]:
    while True:
        pk, sk = setup(desc, old_sk.hash_params, profile, rng)
        if sk.key_id != old_sk.key_id:
            break
    logger.info(
        "key rotated",
        extra={"old_key_id": old_sk.key_id.hex(), "key_id": sk.key_id.hex()},
    )
    return pk, sk


def choose_factorization(
    sk: PrivateKey,
    ledger: FactorLedger,
    rng: random.Random,
) -> tuple[int, int]:
    if sk.policy.max_uses is not None and ledger.entry_count(sk.key_id) >= sk.policy.max_uses:
        raise FactorizationsExhaustedError(
            sk.key_id.hex(),
            f"key reached max_uses={sk.policy.max_uses}, rekey required",
        )
    candidates = [
        d for d in admissible_divisors(sk) if not ledger.is_used(sk.key_id, d)
    ]
    if not candidates:
        raise FactorizationsExhaustedError(
            sk.key_id.hex(),
            "every admissible n_j has been published, rekey required",
        )
    n_j = rng.choice(candidates)
    return sk.n // n_j, n_j


def reserve_trivial_factor(sk: PrivateKey, ledger: FactorLedger) -> None:
    """Burn n_j = 1: with it the public key x is already a root of itself."""
    if not ledger.is_used(sk.key_id, TRIVIAL_FACTOR):
        ledger.record(sk.key_id, TRIVIAL_FACTOR)


def sign(
    sk: PrivateKey,
    pk: PublicKey,
    message: bytes,
    ledger: FactorLedger,
    rng: random.Random,
) -> Signature:
    if not sk.matches(pk):
        raise ClientError(pk.key_id.hex(), "private key does not match public key")
    desc = sk.descriptor
    reserve_trivial_factor(sk, ledger)
    t = random_element(desc, rng)
    t_inverse = inverse(t, desc)
    for _ in range(SIGN_RETRIES):
        n_i, n_j = choose_factorization(sk, ledger, rng)
        y = conjugate(power(sk.g, n_i, desc), t, desc)
        h = hash_to_group(message, encode(y), desc, sk.hash_params)
        alpha = product((t_inverse, sk.s, h, y), desc)
        signature = Signature(y, alpha, n_j)
        # the factor is on the public list before the signature leaves
        if ledger.record(sk.key_id, n_j, signature.fingerprint()) is RecordResult.OK:
            logger.info("message signed", extra={"key_id": sk.key_id.hex(), "n_j": n_j})
            return signature
        logger.warning(
            "n_j taken by a concurrent signer, choosing again",
            extra={"key_id": sk.key_id.hex(), "n_j": n_j},
        )
    raise FactorizationsExhaustedError(sk.key_id.hex(), "ledger contention while signing")


def alpha_shift_bound(pk: PublicKey, sig: Signature) -> int:
    """Largest |shift| an honest alpha = t^-1 s h y can carry."""
    return (
        abs(sig.y.shift)
        + 2 * pk.descriptor.shift_bound
        + pk.hash_params.shift_bound
    )


def verify_equation(pk: PublicKey, message: bytes, sig: Signature) -> bool:
    desc = pk.descriptor
    h = hash_to_group(message, encode(sig.y), desc, pk.hash_params)
    lhs = conjugate(power(sig.y, sig.n_j, desc), sig.alpha, desc)
    rhs = conjugate(pk.x, multiply(h, sig.y, desc), desc)
    return lhs == rhs


def verify(
    pk: PublicKey,
    message: bytes,
    sig: Signature,
    ledger: FactorLedger | None = None,
) -> Verdict:
    """Check y^(n_j alpha) == x^(h' y), then ledger freshness of n_j when a ledger is given."""
    if sig.n_j < 1:
        return _rejected(pk, RejectReason.MALFORMED)
    # conjugation keeps the shift, so the equation pins n_j * y.shift to x.shift
    if sig.n_j * sig.y.shift != pk.x.shift:
        return _rejected(pk, RejectReason.EQUATION_FAILED)
    if abs(sig.alpha.shift) > alpha_shift_bound(pk, sig):
        return _rejected(pk, RejectReason.MALFORMED)
    try:
        holds = verify_equation(pk, message, sig)
    except DimensionMismatchError:
        return _rejected(pk, RejectReason.MALFORMED)
    if not holds:
        return _rejected(pk, RejectReason.EQUATION_FAILED)
    if ledger is not None:
        recorded = ledger.fingerprint_for(pk.key_id, sig.n_j)
        if recorded is not None and recorded != sig.fingerprint():
            return _rejected(pk, RejectReason.REPLAYED_FACTOR)
    return Verdict.accept()


def _rejected(pk: PublicKey, reason: RejectReason) -> Verdict:
    logger.info(
        "signature rejected",
        extra={"key_id": pk.key_id.hex(), "reason": reason.value},
    )
    return Verdict.reject(reason)
