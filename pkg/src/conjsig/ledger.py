"""Append-only list of the n_j values each key has published.

Each record is self-delimiting:
    4-byte big-endian body length
    key_id       (length-prefixed)
    n_j          (length-prefixed two's complement)
    fingerprint  (length-prefixed, empty for reserved entries)
    8-byte big-endian Unix seconds
"""
import fcntl
import os
import threading
import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import BinaryIO, NamedTuple, TypeVar

from conjsig.codec import LENGTH_SIZE, RecordReader, RecordWriter
from conjsig.errors import ClientError, CorruptLedgerError, LedgerStorageError
from conjsig.logs import logger

TIMESTAMP_SIZE = 8

FactorLedgerSelf = TypeVar("FactorLedgerSelf", bound="FactorLedger")


class RecordResult(Enum):
    OK = "ok"
    ALREADY_USED = "AlreadyUsed"


class LedgerEntry(NamedTuple):
    key_id: bytes
    n_j: int
    fingerprint: bytes
    timestamp: int

    @property
    def reserved(self: "LedgerEntry") -> bool:
        return self.fingerprint == b""

    def to_bytes(self: "LedgerEntry") -> bytes:
        body = (
            RecordWriter()
            .put_bytes(self.key_id)
            .put_int(self.n_j)
            .put_bytes(self.fingerprint)
            .put_raw(self.timestamp.to_bytes(TIMESTAMP_SIZE, "big"))
            .getvalue()
        )
        return len(body).to_bytes(LENGTH_SIZE, "big") + body

    def export_line(self: "LedgerEntry") -> str:
        moment = datetime.fromtimestamp(self.timestamp, tz=timezone.utc)
        return f"{self.key_id.hex()} {self.n_j} {moment.isoformat()}"


def _parse(
    data: bytes,
    base: int,
    source: str,
) -> Iterator[tuple[int, int, LedgerEntry]]:
    """Yield (start, end, entry) with offsets counted from the start of the file."""
    offset = 0
    while offset < len(data):
        if offset + LENGTH_SIZE > len(data):
            raise CorruptLedgerError(source, "truncated record length", base + offset)
        size = int.from_bytes(data[offset : offset + LENGTH_SIZE], "big")
        end = offset + LENGTH_SIZE + size
        if end > len(data):
            raise CorruptLedgerError(source, "truncated record body", base + offset)
        reader = RecordReader(data[offset + LENGTH_SIZE : end])
        try:
            key_id = reader.take_bytes()
            n_j = reader.take_int()
            fingerprint = reader.take_bytes()
            timestamp = int.from_bytes(reader.take_raw(TIMESTAMP_SIZE), "big")
            reader.expect_end()
        except ClientError as e:
            raise CorruptLedgerError(
                source,
                f"malformed record ({e.message})",
                base + offset,
            ) from e
        yield base + offset, base + end, LedgerEntry(key_id, n_j, fingerprint, timestamp)
        offset = end


def _read_shared(f: BinaryIO, offset: int = 0) -> bytes:
    """Read from offset to the end under a shared lock, so appends are seen whole."""
    fcntl.flock(f.fileno(), fcntl.LOCK_SH)
    try:
        f.seek(offset)
        return f.read()
    finally:
        fcntl.flock(f.fileno(), fcntl.LOCK_UN)


@dataclass
class FactorLedger:
    storage_path: Path
    entries: dict[bytes, dict[int, LedgerEntry]] = field(default_factory=dict)
    clock: Callable[[], int] = field(default=lambda: int(time.time()))
    _offset: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def load(
        cls: type["FactorLedger"],
        path: str | Path,
        clock: Callable[[], int] | None = None,
    ) -> "FactorLedger":
        ledger = cls(Path(path)) if clock is None else cls(Path(path), clock=clock)
        if not ledger.storage_path.exists():
            logger.info("ledger file missing, starting empty", extra={"path": str(path)})
            return ledger
        try:
            with ledger.storage_path.open("rb") as f:
                data = _read_shared(f)
        except OSError as e:
            raise LedgerStorageError(str(path), "cannot read ledger") from e
        ledger._absorb(data, 0)
        logger.info(
            "ledger loaded",
            extra={"path": str(path), "records": ledger._count(), "bytes": len(data)},
        )
        return ledger

    def _count(self: FactorLedgerSelf) -> int:
        return sum(len(v) for v in self.entries.values())

    def _absorb(self: FactorLedgerSelf, tail: bytes, base: int) -> None:
        source = str(self.storage_path)
        for offset, end, entry in _parse(tail, base, source):
            scoped = self.entries.setdefault(entry.key_id, {})
            if entry.n_j in scoped:
                raise CorruptLedgerError(source, "duplicate (key_id, n_j) record", offset)
            scoped[entry.n_j] = entry
            self._offset = end

    def refresh(self: FactorLedgerSelf) -> None:
        """Pick up records appended by other writers since the last read."""
        with self._lock:
            if self.storage_path.exists():
                with self.storage_path.open("rb") as f:
                    self._absorb(_read_shared(f, self._offset), self._offset)

    def record(
        self: FactorLedgerSelf,
        key_id: bytes,
        n_j: int,
        fingerprint: bytes = b"",
    ) -> RecordResult:
        with self._lock:
            try:
                with self.storage_path.open("a+b") as f:
                    fcntl.flock(f.fileno(), fcntl.LOCK_EX)
                    try:
                        f.seek(self._offset)
                        self._absorb(f.read(), self._offset)
                        if self.is_used(key_id, n_j):
                            return RecordResult.ALREADY_USED
                        entry = LedgerEntry(key_id, n_j, fingerprint, self.clock())
                        raw = entry.to_bytes()
                        f.write(raw)
                        f.flush()
                        os.fsync(f.fileno())
                    finally:
                        fcntl.flock(f.fileno(), fcntl.LOCK_UN)
            except OSError as e:
                raise LedgerStorageError(
                    str(self.storage_path),
                    "cannot append ledger record",
                ) from e
            self.entries.setdefault(key_id, {})[n_j] = entry
            self._offset += len(raw)
        logger.info(
            "ledger record appended",
            extra={"key_id": key_id.hex(), "n_j": n_j, "reserved": entry.reserved},
        )
        return RecordResult.OK

    def is_used(self: FactorLedgerSelf, key_id: bytes, n_j: int) -> bool:
        return n_j in self.entries.get(key_id, {})

    def fingerprint_for(self: FactorLedgerSelf, key_id: bytes, n_j: int) -> bytes | None:
        entry = self.entries.get(key_id, {}).get(n_j)
        return None if entry is None else entry.fingerprint

    def iterate(self: FactorLedgerSelf, key_id: bytes) -> Iterator[LedgerEntry]:
        yield from list(self.entries.get(key_id, {}).values())

    def entry_count(
        self: FactorLedgerSelf,
        key_id: bytes,
        *,
        include_reserved: bool = False,
    ) -> int:
        return sum(
            1 for e in self.iterate(key_id) if include_reserved or not e.reserved
        )

    def key_ids(self: FactorLedgerSelf) -> list[bytes]:
        return list(self.entries)

    def export_lines(self: FactorLedgerSelf) -> list[str]:
        return [
            entry.export_line()
            for key_id in self.key_ids()
            for entry in self.iterate(key_id)
        ]

    @staticmethod
    def repair(path: str | Path) -> int:
        """Cut the file back to its longest valid prefix. Returns bytes dropped."""
        target = Path(path)
        with target.open("r+b") as f:
            fcntl.flock(f.fileno(), fcntl.LOCK_EX)
            try:
                data = f.read()
                valid = 0
                try:
                    for _, end, _ in _parse(data, 0, str(target)):
                        valid = end
                except CorruptLedgerError as e:
                    valid = e.offset
                dropped = len(data) - valid
                if dropped:
                    f.truncate(valid)
                    f.flush()
                    os.fsync(f.fileno())
            finally:
                fcntl.flock(f.fileno(), fcntl.LOCK_UN)
        if dropped:
            logger.warning(
                "ledger truncated to valid prefix",
                extra={"path": str(target), "dropped_bytes": dropped},
            )
        return dropped
