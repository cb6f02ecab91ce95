#!/usr/bin/env python3
"""
Общая инфраструктура для подкоманд движка.

Предоставляет:
- Настройку логирования (stderr, единый формат)
- Отчёт о выполнении команды
- Базовый парсер аргументов CLI

Использование:
    from utils.base_command import setup_logging, CommandReport

    logger = setup_logging('engine', 'INFO')
    report = CommandReport(command='validate')
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(name: str = 'engine', level: Union[int, str] = logging.INFO,
                  stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Настраивает корневое логирование один раз на процесс.

    Логи всегда идут в stderr: stdout зарезервирован для машинного вывода.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    root = logging.getLogger()
    root.setLevel(level)

    if not any(getattr(h, '_engine_handler', False) for h in root.handlers):
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._engine_handler = True
        root.addHandler(handler)

    return logging.getLogger(name)


@dataclass
class CommandReport:
    """Отчёт о выполнении подкоманды."""
    command: str
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    start_time: datetime = field(default_factory=datetime.now)
    end_time: Optional[datetime] = None

    @property
    def duration_seconds(self) -> float:
        end = self.end_time or datetime.now()
        return (end - self.start_time).total_seconds()

    def finish(self) -> 'CommandReport':
        self.end_time = datetime.now()
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'inputs': self.inputs,
            'outputs': self.outputs,
            'errors': self.errors,
            'warnings': self.warnings,
            'duration_seconds': self.duration_seconds,
            'start_time': self.start_time.isoformat(),
            'end_time': self.end_time.isoformat() if self.end_time else None,
        }

    def log_summary(self, logger: logging.Logger) -> None:
        """Пишет итоги в лог (не в stdout)."""
        logger.info(f"📊 {self.command}: входов {len(self.inputs)}, выходов {len(self.outputs)}, "
                    f"ошибок {len(self.errors)}, {self.duration_seconds:.2f} сек")
        for warning in self.warnings:
            logger.warning(f"⚠️ {warning}")
        for error in self.errors:
            logger.error(f"❌ {error}")

    def save(self, report_file: str) -> None:
        """Сохраняет отчёт в JSON файл."""
        path = Path(report_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)


def create_arg_parser(description: str, epilog: Optional[str] = None) -> argparse.ArgumentParser:
    """
    Создаёт базовый парсер аргументов для CLI.

    Args:
        description: Описание скрипта
        epilog: Примеры использования

    Returns:
        Настроенный ArgumentParser с общими флагами
    """
    parser = argparse.ArgumentParser(
        description=description,
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument('--config', help='Файл конфигурации (KEY=VALUE)')
    parser.add_argument('--verbose', '-v', action='store_true', help='Подробный вывод (DEBUG)')
    return parser
