#!/usr/bin/env python3
"""
Унифицированный загрузчик конфигурации движка.

Конфигурация хранится в KEY=VALUE файле (engine.env) и читается через
python-dotenv. Приоритет значений: файл -> переменные окружения -> дефолты.

Использование:
    from utils.config_loader import load_engine_config

    config = load_engine_config('engine.env')
    params = config.predicate_params
    print(config.sampler_params.max_attempts_per_atom)
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional

from dotenv import dotenv_values

from evaluators.predicates import KINEMATIC_PREDICATES, PredicateParams
from samplers.instance_sampler import SamplerParams
from .errors import ConfigError

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = PROJECT_ROOT / 'data'

CONFIG_ENV_VAR = 'ENGINE_CONFIG'


@dataclass(frozen=True)
class EngineConfig:
    """Полная конфигурация движка (секции predicate_params и sampler_params)."""
    predicate_params: PredicateParams = field(default_factory=PredicateParams)
    sampler_params: SamplerParams = field(default_factory=SamplerParams)
    taxonomy_path: Path = DATA_DIR / 'taxonomy.txt'
    object_library_path: Path = DATA_DIR / 'object_library.json'
    strict: bool = False
    kinematic_predicates: FrozenSet[str] = KINEMATIC_PREDICATES
    log_level: str = 'INFO'
    loaded_from: Optional[str] = None


class ConfigLoader:
    """
    Загрузчик KEY=VALUE конфигурации.

    Поддерживает:
    - Загрузку из указанного файла или из ENGINE_CONFIG / engine.env
    - Дефолтные значения
    - Кастинг типов (int, float, bool, list)

    Examples:
        config = ConfigLoader('engine.env')
        gap = config.get_float('PREDICATE_SUPPORT_GAP', default=0.02)
    """

    # Файлы конфигурации в порядке приоритета поиска
    DEFAULT_CONFIG_FILES = [
        'engine.env',
    ]

    def __init__(
        self,
        config_file: Optional[str] = None,
        auto_load: bool = True,
        defaults: Optional[Dict[str, Any]] = None
    ):
        self._config: Dict[str, Optional[str]] = {}
        self._defaults = defaults or {}
        self._loaded_from: Optional[str] = None

        if auto_load:
            self.load(config_file)

    def load(self, config_file: Optional[str] = None) -> bool:
        """
        Загружает конфигурацию из файла.

        Args:
            config_file: Путь к файлу (если None - ENGINE_CONFIG, затем автопоиск)

        Returns:
            True если файл найден и прочитан
        """
        candidates: List[str] = []
        if config_file:
            # Явно указанный файл обязан существовать
            if not Path(config_file).exists():
                raise ConfigError('config_file', 'file not found', config_file)
            candidates.append(config_file)
        else:
            env_path = os.getenv(CONFIG_ENV_VAR)
            if env_path:
                if not Path(env_path).exists():
                    raise ConfigError(CONFIG_ENV_VAR, 'file not found', env_path)
                candidates.append(env_path)
            candidates.extend(self.DEFAULT_CONFIG_FILES)

        for env_file in candidates:
            if Path(env_file).exists():
                self._config = dict(dotenv_values(env_file))
                self._loaded_from = env_file
                return True

        self._config = {}
        return False

    def get(
        self,
        key: str,
        default: Any = None,
        cast_type: Optional[type] = None
    ) -> Any:
        """
        Получает значение конфигурации.

        Args:
            key: Ключ конфигурации
            default: Значение по умолчанию
            cast_type: Тип для приведения (int, float, bool, str)

        Returns:
            Значение конфигурации или дефолт
        """
        value = self._config.get(key)

        if value is None:
            value = os.getenv(key)

        if value is None or value == '':
            value = self._defaults.get(key, default)

        if value is None:
            return None

        if cast_type and isinstance(value, str):
            try:
                if cast_type == bool:
                    lowered = value.strip().lower()
                    if lowered in ('true', '1', 'yes', 'on'):
                        return True
                    if lowered in ('false', '0', 'no', 'off'):
                        return False
                    raise ValueError(value)
                return cast_type(value.strip())
            except (ValueError, TypeError):
                raise ConfigError(key, f'expected {cast_type.__name__}', value)

        return value

    def get_int(self, key: str, default: int = 0) -> int:
        """Получает значение как int."""
        return self.get(key, default=default, cast_type=int)

    def get_float(self, key: str, default: float = 0.0) -> float:
        """Получает значение как float."""
        return self.get(key, default=default, cast_type=float)

    def get_bool(self, key: str, default: bool = False) -> bool:
        """Получает значение как bool."""
        return self.get(key, default=default, cast_type=bool)

    def get_list(self, key: str, default: Optional[List[str]] = None, separator: str = ',') -> List[str]:
        """
        Получает значение как список (разделённый separator).

        Пример: "ontop,inside" -> ['ontop', 'inside']
        """
        value = self.get(key)
        if value is None:
            return list(default or [])
        if not isinstance(value, str):
            return list(value)
        return [item.strip() for item in value.split(separator) if item.strip()]

    def get_path(self, key: str, default: Path) -> Path:
        """Получает путь; относительные пути считаются от файла конфигурации."""
        value = self.get(key)
        if value is None:
            return default
        path = Path(value)
        if not path.is_absolute() and self._loaded_from:
            path = Path(self._loaded_from).resolve().parent / path
        return path

    @property
    def loaded_from(self) -> Optional[str]:
        """Возвращает путь к загруженному файлу конфигурации."""
        return self._loaded_from

    def __repr__(self) -> str:
        return f"ConfigLoader(loaded_from={self._loaded_from!r})"


def load_engine_config(config_file: Optional[str] = None) -> EngineConfig:
    """
    Собирает EngineConfig из файла конфигурации.

    Args:
        config_file: Путь к файлу (опционально)

    Returns:
        Провалидированный EngineConfig
    """
    loader = ConfigLoader(config_file)
    base_predicates = PredicateParams()
    base_sampler = SamplerParams()

    try:
        predicate_params = PredicateParams(
            touch_epsilon=loader.get_float('PREDICATE_TOUCH_EPSILON', base_predicates.touch_epsilon),
            support_gap=loader.get_float('PREDICATE_SUPPORT_GAP', base_predicates.support_gap),
            footprint_ratio=loader.get_float('PREDICATE_FOOTPRINT_RATIO', base_predicates.footprint_ratio),
            inside_ratio=loader.get_float('PREDICATE_INSIDE_RATIO', base_predicates.inside_ratio),
            nextto_scale=loader.get_float('PREDICATE_NEXTTO_SCALE', base_predicates.nextto_scale),
        )
    except ValueError as e:
        raise ConfigError('predicate_params', str(e))

    try:
        sampler_params = SamplerParams(
            max_attempts_per_atom=loader.get_int('SAMPLER_MAX_ATTEMPTS_PER_ATOM', base_sampler.max_attempts_per_atom),
            clearance=loader.get_float('SAMPLER_CLEARANCE', base_sampler.clearance),
            seed=loader.get_int('SAMPLER_SEED', base_sampler.seed),
        )
    except ValueError as e:
        raise ConfigError('sampler_params', str(e))

    taxonomy_path = loader.get_path('TAXONOMY_PATH', DATA_DIR / 'taxonomy.txt')
    object_library_path = loader.get_path('OBJECT_LIBRARY_PATH', DATA_DIR / 'object_library.json')
    for key, path in (('TAXONOMY_PATH', taxonomy_path), ('OBJECT_LIBRARY_PATH', object_library_path)):
        if not path.exists():
            raise ConfigError(key, 'file not found', str(path))

    predicates = loader.get_list('KINEMATIC_PREDICATES', sorted(KINEMATIC_PREDICATES))

    return EngineConfig(
        predicate_params=predicate_params,
        sampler_params=sampler_params,
        taxonomy_path=taxonomy_path,
        object_library_path=object_library_path,
        strict=loader.get_bool('STRICT', False),
        kinematic_predicates=frozenset(p.lower() for p in predicates),
        log_level=str(loader.get('LOG_LEVEL', 'INFO')).upper(),
        loaded_from=loader.loaded_from,
    )


# === CLI интерфейс для отладки ===
if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Проверка конфигурации движка")
    parser.add_argument("--config-file", help="Путь к файлу конфигурации")
    args = parser.parse_args()

    engine_config = load_engine_config(args.config_file)
    print(f"📁 Загружено из: {engine_config.loaded_from or 'не найдено'}")
    print(engine_config)
