"""End-to-end runs of the conjsig command line."""

from pathlib import Path

import pytest

from conjsig.cli import EXIT_OK, EXIT_REJECT, EXIT_USAGE, main
from conjsig.ledger import FactorLedger


@pytest.fixture()
def workdir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CONJSIG_LEDGER", raising=False)
    (tmp_path / "msg.txt").write_bytes(b"hello conjugacy\n")
    return tmp_path


def keygen(*extra: str) -> int:
    return main(["keygen", "--seed", "1", *extra])


class TestRoundTrip:
    def test_keygen_sign_verify(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert keygen() == EXIT_OK
        assert (workdir / "conjsig.key").exists()
        assert (workdir / "conjsig.pub").exists()
        assert main(["sign", "msg.txt"]) == EXIT_OK
        assert (workdir / "msg.txt.sig").exists()
        capsys.readouterr()
        assert main(["verify", "msg.txt", "msg.txt.sig"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "accept"

    def test_modified_message(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        keygen()
        main(["sign", "msg.txt", "--out", "msg.sig"])
        (workdir / "msg.txt").write_bytes(b"hello conjugacz\n")
        capsys.readouterr()
        assert main(["verify", "msg.txt", "msg.sig"]) == EXIT_REJECT
        assert "EquationFailed" in capsys.readouterr().err

    def test_hex_format(self, workdir: Path) -> None:
        assert keygen("--format", "hex") == EXIT_OK
        assert (workdir / "conjsig.pub").read_text().startswith("4e5301")
        assert main(["sign", "msg.txt", "--format", "hex"]) == EXIT_OK
        assert (workdir / "msg.txt.sig").read_text().startswith("4e5303")
        assert main(["verify", "msg.txt", "msg.txt.sig"]) == EXIT_OK

    def test_seed_is_deterministic(self, workdir: Path) -> None:
        keygen("--key", "a.key", "--pub", "a.pub", "--ledger", "a.ledger")
        keygen("--key", "b.key", "--pub", "b.pub", "--ledger", "b.ledger")
        assert (workdir / "a.pub").read_bytes() == (workdir / "b.pub").read_bytes()
        assert (workdir / "a.key").read_bytes() == (workdir / "b.key").read_bytes()

    def test_corrupted_signature(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        keygen()
        main(["sign", "msg.txt"])
        sig = workdir / "msg.txt.sig"
        sig.write_bytes(sig.read_bytes()[:-3])
        capsys.readouterr()
        assert main(["verify", "msg.txt", "msg.txt.sig"]) == EXIT_REJECT
        assert "Malformed" in capsys.readouterr().err


class TestErrors:
    def test_missing_public_key(self, workdir: Path) -> None:
        (workdir / "msg.txt.sig").write_bytes(b"NS")
        assert main(["verify", "msg.txt", "msg.txt.sig"]) == EXIT_USAGE

    def test_unknown_command(self, workdir: Path) -> None:
        assert main(["encrypt"]) == EXIT_USAGE

    def test_exhausted_key(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        keygen()
        for i in range(11):
            assert main(["sign", "msg.txt", "--out", f"{i}.sig"]) == EXIT_OK
        capsys.readouterr()
        assert main(["sign", "msg.txt"]) == EXIT_USAGE
        assert "rekey" in capsys.readouterr().err


class TestLedgerCommand:
    def test_export(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        keygen()
        main(["sign", "msg.txt"])
        capsys.readouterr()
        assert main(["ledger", "export"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 2
        assert lines[0].split()[1] == "1"

    def test_list(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        keygen()
        main(["sign", "msg.txt"])
        capsys.readouterr()
        assert main(["ledger", "list"]) == EXIT_OK
        assert "used=1" in capsys.readouterr().out

    def test_env_ledger(self, workdir: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("CONJSIG_LEDGER", str(workdir / "env.ledger"))
        keygen()
        main(["sign", "msg.txt"])
        assert not (workdir / "conjsig.ledger").exists()
        ledger = FactorLedger.load(workdir / "env.ledger")
        assert len(ledger.key_ids()) == 1

    def test_repair(self, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        keygen()
        path = workdir / "conjsig.ledger"
        path.write_bytes(path.read_bytes() + b"\x00\x00\x00\x09abc")
        capsys.readouterr()
        assert main(["ledger", "repair"]) == EXIT_OK
        assert "dropped 7 bytes" in capsys.readouterr().out


class TestAttackCommand:
    @pytest.mark.parametrize("demo", ["forge", "trivial"])
    def test_forgery_report(self, demo: str, workdir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["attack", demo, "--seed", "4"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "forgery raw verify, expected=accept, observed=accept, pass" in out
        assert "observed=ReplayedFactor, pass" in out
