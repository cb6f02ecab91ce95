#!/usr/bin/env python3
"""
Манифест ассетов: сводная статистика наборов сцен.

Колонки в порядке сравнительной таблицы ассетов:
Apt. (квартиры), Rm. (комнаты), Cat. (категории), Obj. (объекты),
A.O. (артикулированные объекты).

Семантика подсчёта:
- Rm. суммируется по всем квартирам
- Cat. считает различные категории
- A.O. является подмножеством Obj.

Использование:
    from utils.manifest import load_manifest_file, render_manifest

    manifest = load_manifest_file('data/manifest.json')
    print(render_manifest(manifest, markdown=True))
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Sequence, Tuple, Union

from world.scene import SceneState

from .errors import FormatError

logger = logging.getLogger(__name__)

COUNT_FIELDS: Tuple[str, ...] = (
    'apartment_count',
    'room_count',
    'category_count',
    'object_count',
    'articulated_object_count',
)
COLUMN_TITLES: Tuple[str, ...] = ('Apt.', 'Rm.', 'Cat.', 'Obj.', 'A.O.')


@dataclass(frozen=True)
class ManifestRow:
    """Одна строка манифеста (один набор ассетов)."""
    asset_name: str
    apartment_count: int
    room_count: int
    category_count: int
    object_count: int
    articulated_object_count: int

    def __post_init__(self):
        for name in COUNT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} должен быть целым >= 0, получено {value!r}")
        if self.articulated_object_count > self.object_count:
            raise ValueError("articulated_object_count не может превышать object_count")

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(getattr(self, name) for name in COUNT_FIELDS)

    def to_dict(self) -> dict:
        data = {'asset_name': self.asset_name}
        data.update({name: getattr(self, name) for name in COUNT_FIELDS})
        return data


@dataclass(frozen=True)
class Manifest:
    rows: Tuple[ManifestRow, ...]

    def to_dict(self) -> List[dict]:
        return [row.to_dict() for row in self.rows]


def manifest_from_data(data: Any, location: str = '<manifest>') -> Manifest:
    """Строит манифест из JSON-массива строк с шестью именованными полями."""
    if not isinstance(data, list):
        raise FormatError(location, 'манифест должен быть JSON-массивом')
    rows = []
    for index, entry in enumerate(data):
        where = f"{location}: [{index}]"
        if not isinstance(entry, dict):
            raise FormatError(where, 'строка манифеста должна быть объектом')
        missing = [key for key in ('asset_name',) + COUNT_FIELDS if key not in entry]
        if missing:
            raise FormatError(where, f"нет полей: {', '.join(missing)}")
        if not isinstance(entry['asset_name'], str):
            raise FormatError(where, 'asset_name должен быть строкой')
        try:
            rows.append(ManifestRow(entry['asset_name'], *(entry[name] for name in COUNT_FIELDS)))
        except ValueError as e:
            raise FormatError(where, str(e)) from None
    return Manifest(tuple(rows))


def load_manifest(source: str, location: str = '<manifest>') -> Manifest:
    try:
        data = json.loads(source)
    except json.JSONDecodeError as e:
        raise FormatError(f"{location}:{e.lineno}:{e.colno}", e.msg) from None
    return manifest_from_data(data, location)


def load_manifest_file(path: Union[str, Path]) -> Manifest:
    path = Path(path)
    manifest = load_manifest(path.read_text(encoding='utf-8'), str(path))
    logger.debug(f"Манифест {path}: {len(manifest.rows)} строк")
    return manifest


def manifest_row_from_scenes(name: str, scenes: Sequence[SceneState]) -> ManifestRow:
    """Считает строку манифеста по файлам сцен (одна сцена = одна квартира)."""
    categories = set()
    objects = 0
    articulated = 0
    rooms = 0
    for scene in scenes:
        rooms += len(scene.rooms)
        objects += len(scene.objects)
        for obj in scene.objects.values():
            categories.add(obj.category)
            if obj.articulated:
                articulated += 1
    return ManifestRow(name, len(scenes), rooms, len(categories), objects, articulated)


def render_manifest(manifest: Manifest, markdown: bool = False) -> str:
    """
    Выводит таблицу манифеста.

    Args:
        manifest: Манифест
        markdown: Markdown-таблица с жирными максимумами по каждой колонке

    Returns:
        Текст таблицы с завершающим переводом строки
    """
    header = ('Asset',) + COLUMN_TITLES
    if markdown:
        maxima = [max((row.counts[i] for row in manifest.rows), default=None) for i in range(len(COUNT_FIELDS))]
        lines = [
            '| ' + ' | '.join(header) + ' |',
            '|---|' + '---:|' * len(COUNT_FIELDS),
        ]
        for row in manifest.rows:
            cells = [f"**{value}**" if value == maxima[i] else str(value) for i, value in enumerate(row.counts)]
            lines.append('| ' + ' | '.join([row.asset_name] + cells) + ' |')
        return '\n'.join(lines) + '\n'

    table = [header] + [(row.asset_name,) + tuple(str(v) for v in row.counts) for row in manifest.rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(header))]
    lines = []
    for line in table:
        cells = [line[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(line[1:], widths[1:])]
        lines.append('  '.join(cells).rstrip())
    return '\n'.join(lines) + '\n'
