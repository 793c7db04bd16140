import argparse
import os
import random
import sys
import traceback
from pathlib import Path
from typing import NamedTuple, TypeVar

from conjsig.attack_lab import run_demo
from conjsig.errors import ClientError, MalformedHeaderError, ServerError
from conjsig.ledger import FactorLedger
from conjsig.logs import logger
from conjsig.parameter import parameter
from conjsig.signature_core import (
    FILE_MAGIC,
    PrivateKey,
    Profile,
    PublicKey,
    RejectReason,
    Signature,
    reserve_trivial_factor,
    setup,
    sign,
    verify,
)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2

ResponseSelf = TypeVar("ResponseSelf", bound="Response")
CliConfigSelf = TypeVar("CliConfigSelf", bound="CliConfig")


class EnvParam(NamedTuple):
    CONJSIG_LEDGER: str | None

    @classmethod
    def from_env(cls: type["EnvParam"]) -> "EnvParam":
        return EnvParam(**{k: os.environ.get(k) for k in EnvParam._fields})


class CliConfig(NamedTuple):
    profile: str
    ledger_path: Path
    key_path: Path
    pub_path: Path
    seed: int | None
    output_format: str

    @classmethod
    def from_args(
        cls: type["CliConfig"],
        args: argparse.Namespace,
        env: EnvParam,
    ) -> "CliConfig":
        ledger = args.ledger or env.CONJSIG_LEDGER or parameter["cli"]["default_ledger"]
        return CliConfig(
            profile=args.profile,
            ledger_path=Path(ledger),
            key_path=Path(args.key),
            pub_path=Path(args.pub),
            seed=args.seed,
            output_format=args.format,
        )

    def rng(self: CliConfigSelf) -> random.Random:
        return random.SystemRandom() if self.seed is None else random.Random(self.seed)

    def write(self: CliConfigSelf, path: Path, data: bytes) -> None:
        if self.output_format == "hex":
            path.write_text(data.hex() + "\n", encoding="ascii")
        else:
            path.write_bytes(data)
        logger.info("artifact written", extra={"path": str(path), "bytes": len(data)})


class Response(NamedTuple):
    exit_code: int
    message: str

    def emit(self: ResponseSelf) -> int:
        stream = sys.stdout if self.exit_code == EXIT_OK else sys.stderr
        if self.message:
            stream.write(self.message if self.message.endswith("\n") else self.message + "\n")
        return self.exit_code


def read_artifact(path: Path) -> bytes:
    """Raw file bytes, unwrapping the hex output format when present."""
    raw = path.read_bytes()
    if raw.startswith(FILE_MAGIC):
        return raw
    try:
        return bytes.fromhex(raw.decode("ascii").strip())
    except ValueError as e:
        raise MalformedHeaderError(str(path), "neither binary nor hex artifact") from e


def cmd_keygen(config: CliConfig) -> Response:
    profile = Profile.from_name(config.profile)
    pk, sk = setup(profile.descriptor, profile.hash_params, profile, config.rng())
    config.write(config.key_path, sk.to_bytes())
    config.write(config.pub_path, pk.to_bytes())
    reserve_trivial_factor(sk, FactorLedger.load(config.ledger_path))
    return Response(EXIT_OK, f"key_id {pk.key_id.hex()}")


def cmd_sign(config: CliConfig, message_file: Path, out: Path | None) -> Response:
    sk = PrivateKey.from_bytes(read_artifact(config.key_path))
    pk = PublicKey.from_bytes(read_artifact(config.pub_path))
    ledger = FactorLedger.load(config.ledger_path)
    signature = sign(sk, pk, message_file.read_bytes(), ledger, config.rng())
    target = out or message_file.with_name(message_file.name + ".sig")
    config.write(target, signature.to_bytes())
    return Response(EXIT_OK, f"signed with n_j={signature.n_j} -> {target}")


def cmd_verify(config: CliConfig, message_file: Path, signature_file: Path) -> Response:
    pk = PublicKey.from_bytes(read_artifact(config.pub_path))
    message = message_file.read_bytes()
    try:
        signature = Signature.from_bytes(read_artifact(signature_file), pk.descriptor)
    except ClientError:
        logger.warning(traceback.format_exc())
        return Response(EXIT_REJECT, RejectReason.MALFORMED.value)
    ledger = FactorLedger.load(config.ledger_path)
    verdict = verify(pk, message, signature, ledger)
    if verdict.accepted:
        return Response(EXIT_OK, "accept")
    reason = verdict.reason or RejectReason.EQUATION_FAILED
    return Response(EXIT_REJECT, reason.value)


def cmd_ledger(config: CliConfig, subcommand: str) -> Response:
    if subcommand == "repair":
        dropped = FactorLedger.repair(config.ledger_path)
        return Response(EXIT_OK, f"dropped {dropped} bytes")
    ledger = FactorLedger.load(config.ledger_path)
    if subcommand == "export":
        return Response(EXIT_OK, "".join(line + "\n" for line in ledger.export_lines()))
    summary = [
        f"{key_id.hex()} used={ledger.entry_count(key_id)} "
        f"n_j={[e.n_j for e in ledger.iterate(key_id) if not e.reserved]}"
        for key_id in ledger.key_ids()
    ]
    return Response(EXIT_OK, "".join(line + "\n" for line in summary))


def cmd_attack(config: CliConfig, demo: str) -> Response:
    ledger = FactorLedger.load(config.ledger_path)
    report = run_demo(demo, config.profile, config.rng(), ledger)
    if not report.passed:
        return Response(EXIT_REJECT, report.render())
    return Response(EXIT_OK, report.render())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--profile",
        choices=sorted(parameter["profile"]),
        default=parameter["cli"]["default_profile"],
    )
    common.add_argument("--ledger", default=None)
    common.add_argument("--key", default="conjsig.key")
    common.add_argument("--pub", default="conjsig.pub")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument(
        "--format",
        choices=["binary", "hex"],
        default=parameter["cli"]["default_format"],
    )

    parser = argparse.ArgumentParser(prog="conjsig", description="conjugacy-based signatures")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("keygen", parents=[common])
    sign_parser = commands.add_parser("sign", parents=[common])
    sign_parser.add_argument("message", type=Path)
    sign_parser.add_argument("--out", type=Path, default=None)
    verify_parser = commands.add_parser("verify", parents=[common])
    verify_parser.add_argument("message", type=Path)
    verify_parser.add_argument("signature", type=Path)
    ledger_parser = commands.add_parser("ledger", parents=[common])
    ledger_parser.add_argument("action", choices=["list", "export", "repair"])
    attack_parser = commands.add_parser("attack", parents=[common])
    attack_parser.add_argument("demo", choices=["root", "forge", "tamper", "csp", "trivial"])
    return parser


def service(args: argparse.Namespace, config: CliConfig) -> Response:
    if args.command == "keygen":
        return cmd_keygen(config)
    if args.command == "sign":
        return cmd_sign(config, args.message, args.out)
    if args.command == "verify":
        return cmd_verify(config, args.message, args.signature)
    if args.command == "ledger":
        return cmd_ledger(config, args.action)
    return cmd_attack(config, args.demo)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return service(args, CliConfig.from_args(args, EnvParam.from_env())).emit()
    except ServerError:
        logger.error(traceback.format_exc())
        return Response(EXIT_USAGE, "internal error. Check the ledger and key files.").emit()
    except ClientError as ce:
        logger.warning(traceback.format_exc())
        return Response(EXIT_USAGE, f"client error. {ce.message}").emit()
    except OSError as e:
        logger.warning(traceback.format_exc())
        return Response(EXIT_USAGE, f"io error. {e}").emit()
    except Exception:
        logger.error(traceback.format_exc())
        return Response(EXIT_USAGE, "internal error. Please contact the operator.").emit()


def main_exit() -> None:
    sys.exit(main())
