"""Error types and their exit codes."""


class BlufsError(Exception):
    """Базовая ошибка приложения с кодом выхода."""

    exit_code: int = 1
    category: str = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(BlufsError):
    """Ошибка конфигурации (отсутствующий ключ, тип, диапазон, лишний ключ)."""

    exit_code = 1
    category = "config"

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class InvalidArgumentError(BlufsError, ValueError):
    """Недопустимый аргумент операции."""

    exit_code = 1
    category = "invalid-argument"


class DataIOError(BlufsError):
    """Ошибка чтения/записи данных."""

    exit_code = 2
    category = "io"


class DataFormatError(DataIOError):
    """Файл не соответствует ожидаемому формату (например, пустой)."""


class DataParseError(DataIOError):
    """Ошибка разбора ячейки или строки CSV."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalError(BlufsError):
    """Численный сбой (нефинитные значения, вырожденная система)."""

    exit_code = 3
    category = "numerical"

    def __init__(self, message: str, context: dict | None = None):
        super().__init__(message)
        self.context = context or {}


class ContractViolation(NumericalError):
    """Несогласованные размерности входов решателя."""

    category = "contract"
