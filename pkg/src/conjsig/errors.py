from typing import TypeVar

ClientErrorSelf = TypeVar("ClientErrorSelf", bound="ClientError")
ServerErrorSelf = TypeVar("ServerErrorSelf", bound="ServerError")
CorruptLedgerErrorSelf = TypeVar("CorruptLedgerErrorSelf", bound="CorruptLedgerError")


class ClientError(Exception):
    def __init__(self: ClientErrorSelf, input_param: str, message: str) -> None:
        self.message = message
        super().__init__(f"{message}: {input_param}")


class ServerError(Exception):
    def __init__(self: ServerErrorSelf, input_param: str, message: str) -> None:
        self.message = message
        super().__init__(f"{message}: {input_param}")


class DimensionMismatchError(ClientError):
    pass


class MalformedHeaderError(ClientError):
    pass


class MalformedLengthPrefixError(ClientError):
    pass


class TrailingBytesError(ClientError):
    pass


class PreconditionError(ClientError):
    pass


class ScreeningError(ClientError):
    pass


class FactorizationsExhaustedError(ClientError):
    pass


class InvalidSignatureError(ClientError):
    pass


class EnumerationBudgetExceededError(ClientError):
    pass


class LedgerStorageError(ServerError):
    pass


class CorruptLedgerError(ServerError):
    def __init__(
        self: CorruptLedgerErrorSelf,
        input_param: str,
        message: str,
        offset: int,
    ) -> None:
        self.offset = offset
        super().__init__(input_param, f"{message} at byte offset {offset}")
