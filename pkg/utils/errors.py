"""
Базовые исключения движка.

Каждый доменный пакет (parsers, world, evaluators, samplers, benchmarks)
наследует свои ошибки от EngineError, чтобы CLI мог единообразно
превращать их в код выхода 1.
"""

from typing import Optional


class EngineError(Exception):
    """Базовая ошибка предметной области."""

    exit_code = 1


class FormatError(EngineError):
    """Файл не соответствует ожидаемому формату."""

    def __init__(self, location: str, reason: str):
        self.location = location
        self.reason = reason
        super().__init__(f"{location}: {reason}")


class ConfigError(EngineError):
    """Некорректная конфигурация движка."""

    def __init__(self, key: str, reason: str, value: Optional[str] = None):
        self.key = key
        self.reason = reason
        self.value = value
        shown = f" (={value!r})" if value is not None else ""
        super().__init__(f"config {key}{shown}: {reason}")
