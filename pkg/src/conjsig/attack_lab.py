"""Attacks on the signature scheme, run against the real implementation."""
import itertools
import random
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple, TypeVar

from conjsig.errors import (
    EnumerationBudgetExceededError,
    InvalidSignatureError,
    PreconditionError,
)
from conjsig.hash_to_group import hash_to_group
from conjsig.ledger import FactorLedger
from conjsig.logs import logger
from conjsig.platform_group import (
    GroupElement,
    PlatformDescriptor,
    conjugate,
    encode,
    inverse,
    multiply,
    power,
    product,
    random_element,
)
from conjsig.signature_core import (
    Profile,
    PublicKey,
    RejectReason,
    Signature,
    Verdict,
    setup,
    sign,
    verify,
)

DEFAULT_BUDGET = 10**7

AttackReportSelf = TypeVar("AttackReportSelf", bound="AttackReport")


class ForgeryResult(NamedTuple):
    forged_signature: Signature
    raw_verify: Verdict
    ledgered_verify: Verdict


class Assertion(NamedTuple):
    name: str
    expected: str
    observed: str

    @property
    def passed(self: "Assertion") -> bool:
        return self.expected == self.observed

    def line(self: "Assertion") -> str:
        status = "pass" if self.passed else "fail"
        return f"{self.name}, expected={self.expected}, observed={self.observed}, {status}"


class AttackReport(NamedTuple):
    demo: str
    assertions: list[Assertion]

    @property
    def passed(self: AttackReportSelf) -> bool:
        return all(a.passed for a in self.assertions)

    def render(self: AttackReportSelf) -> str:
        return "\n".join(a.line() for a in self.assertions) + "\n"


def describe(verdict: Verdict) -> str:
    return "accept" if verdict.accepted or verdict.reason is None else verdict.reason.value


def blinded_secret(pk: PublicKey, message: bytes, sig: Signature) -> GroupElement:
    """alpha y^-1 h^-1, which equals t^-1 s for an honest signature."""
    desc = pk.descriptor
    h = hash_to_group(message, encode(sig.y), desc, pk.hash_params)
    return product((sig.alpha, inverse(sig.y, desc), inverse(h, desc)), desc)


def root_candidate(pk: PublicKey, message: bytes, sig: Signature) -> GroupElement:
    return conjugate(sig.y, blinded_secret(pk, message, sig), pk.descriptor)


def extract_root(pk: PublicKey, message: bytes, sig: Signature) -> GroupElement:
    """An n_j-th root of x recovered from one published signature."""
    if not verify(pk, message, sig).accepted:
        raise InvalidSignatureError(pk.key_id.hex(), "root extraction needs a valid signature")
    return root_candidate(pk, message, sig)


def build_forgery(
    pk: PublicKey,
    r: GroupElement,
    n_j: int,
    forged_message: bytes,
    rng: random.Random,
) -> Signature:
    desc = pk.descriptor
    c = random_element(desc, rng)
    y_f = conjugate(r, c, desc)
    h_f = hash_to_group(forged_message, encode(y_f), desc, pk.hash_params)
    alpha_f = product((inverse(c, desc), h_f, y_f), desc)
    return Signature(y_f, alpha_f, n_j)


def forge_with_reused_factor(
    pk: PublicKey,
    r: GroupElement,
    n_j: int,
    forged_message: bytes,
    rng: random.Random,
    ledger: FactorLedger,
) -> ForgeryResult:
    if power(r, n_j, pk.descriptor) != pk.x:
        raise PreconditionError(str(n_j), "r is not an n_j-th root of x")
    forged = build_forgery(pk, r, n_j, forged_message, rng)
    result = ForgeryResult(
        forged_signature=forged,
        raw_verify=verify(pk, forged_message, forged),
        ledgered_verify=verify(pk, forged_message, forged, ledger),
    )
    logger.info(
        "reuse forgery evaluated",
        extra={
            "n_j": n_j,
            "raw": describe(result.raw_verify),
            "ledgered": describe(result.ledgered_verify),
        },
    )
    return result


def forge_with_public_key(
    pk: PublicKey,
    forged_message: bytes,
    rng: random.Random,
    ledger: FactorLedger,
) -> ForgeryResult:
    """x is a first root of itself, so n_j = 1 needs no signature at all."""
    return forge_with_reused_factor(pk, pk.x, 1, forged_message, rng, ledger)


def data_forge_attempt(
    pk: PublicKey,
    sig: Signature,
    original_message: bytes,
    forged_message: bytes,
) -> Verdict:
    verdict = verify(pk, forged_message, sig)
    logger.info(
        "data forging attempt",
        extra={
            "same_message": original_message == forged_message,
            "verdict": describe(verdict),
        },
    )
    return verdict


def _candidates(
    dimension: int,
    box_bound: int,
    first: int | None = None,
) -> Iterator[GroupElement]:
    span = range(-box_bound, box_bound + 1)
    heads = span if first is None else [first]
    for head in heads:
        for rest in itertools.product(span, repeat=dimension):
            coordinates = (head, *rest)
            yield GroupElement(coordinates[:dimension], coordinates[dimension])


def _search(
    desc: PlatformDescriptor,
    g: GroupElement,
    x: GroupElement,
    box_bound: int,
    first: int | None,
) -> GroupElement | None:
    for h in _candidates(desc.dimension, box_bound, first):
        # g^h = x  <=>  g h = h x
        if multiply(g, h, desc) == multiply(h, x, desc):
            return h
    return None


def brute_force_csp(
    desc: PlatformDescriptor,
    g: GroupElement,
    x: GroupElement,
    box_bound: int,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> GroupElement | None:
    """Lexicographically first h in the coordinate box with g^h = x, if any."""
    candidates = (2 * box_bound + 1) ** (desc.dimension + 1)
    if candidates > budget:
        logger.warning(
            "brute force refused",
            extra={"candidates": candidates, "budget": budget},
        )
        raise EnumerationBudgetExceededError(
            str(box_bound),
            f"{candidates} candidates exceed the budget of {budget}",
        )
    if workers <= 1:
        return _search(desc, g, x, box_bound, None)
    heads = list(range(-box_bound, box_bound + 1))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_search, desc, g, x, box_bound, head) for head in heads
        ]
        # heads are in lexicographic order, so the first non-empty partition wins
        for future in futures:
            found = future.result()
            if found is not None:
                return found
    return None


def _csp_assertions(
    pk: PublicKey,
    g_n: GroupElement,
    rng: random.Random,
) -> list[Assertion]:
    desc = pk.descriptor
    g = random_element(desc, rng)
    planted = GroupElement(
        tuple(rng.randint(-2, 2) for _ in range(desc.dimension)),
        rng.randint(-2, 2),
    )
    x = conjugate(g, planted, desc)
    found = brute_force_csp(desc, g, x, 2)
    recovered = found is not None and conjugate(g, found, desc) == x
    # the attacker's best case: g^n known, s sought in the same small box
    found_key = brute_force_csp(desc, g_n, pk.x, 2)
    sound = found_key is None or conjugate(g_n, found_key, desc) == pk.x
    return [
        Assertion("planted conjugator recovered", "True", str(recovered)),
        Assertion("public key search is sound", "True", str(sound)),
    ]


def run_demo(
    demo: str,
    profile_name: str,
    rng: random.Random,
    ledger: FactorLedger,
) -> AttackReport:
    profile = Profile.from_name(profile_name)
    pk, sk = setup(profile.descriptor, profile.hash_params, profile, rng)
    desc = pk.descriptor
    message = b"attack demo message"
    forged_message = b"attack demo forged message"
    if demo == "csp":
        assertions = _csp_assertions(pk, power(sk.g, sk.n, desc), rng)
        return _report(demo, assertions)
    sig = sign(sk, pk, message, ledger, rng)
    assertions = [
        Assertion("honest signature", "accept", describe(verify(pk, message, sig, ledger))),
    ]
    if demo == "tamper":
        flipped = bytes([message[0] ^ 0x01]) + message[1:]
        verdict = data_forge_attempt(pk, sig, message, flipped)
        assertions.append(
            Assertion("tampered message", RejectReason.EQUATION_FAILED.value, describe(verdict)),
        )
    elif demo == "root":
        r = extract_root(pk, message, sig)
        assertions.append(
            Assertion("root^n_j equals x", "True", str(power(r, sig.n_j, desc) == pk.x)),
        )
    elif demo in ("forge", "trivial"):
        if demo == "forge":
            r = extract_root(pk, message, sig)
            result = forge_with_reused_factor(pk, r, sig.n_j, forged_message, rng, ledger)
        else:
            result = forge_with_public_key(pk, forged_message, rng, ledger)
        assertions.extend(
            [
                Assertion("forgery raw verify", "accept", describe(result.raw_verify)),
                Assertion(
                    "forgery ledgered verify",
                    RejectReason.REPLAYED_FACTOR.value,
                    describe(result.ledgered_verify),
                ),
            ],
        )
    else:
        raise PreconditionError(demo, "unknown attack demo")
    return _report(demo, assertions)


def _report(demo: str, assertions: list[Assertion]) -> AttackReport:
    for assertion in assertions:
        logger.info(
            "attack assertion",
            extra={**assertion._asdict(), "demo": demo, "passed": assertion.passed},
        )
    return AttackReport(demo, assertions)
