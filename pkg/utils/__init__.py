# Utils package
# Общие утилиты движка: ошибки, логирование, отчёты, манифест ассетов.
# config_loader импортируется напрямую (utils.config_loader), так как
# зависит от доменных пакетов.

from .errors import (
    EngineError,
    FormatError,
    ConfigError,
)

from .base_command import (
    CommandReport,
    create_arg_parser,
    setup_logging,
)

__all__ = [
    # Errors
    'EngineError',
    'FormatError',
    'ConfigError',

    # Commands
    'CommandReport',
    'create_arg_parser',
    'setup_logging',
]
