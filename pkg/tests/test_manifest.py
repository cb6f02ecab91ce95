"""
Тесты манифеста ассетов и его рендеринга.
"""

import json

import pytest

from conftest import DATA_DIR
from utils.errors import FormatError
from utils.manifest import (
    Manifest,
    ManifestRow,
    load_manifest,
    load_manifest_file,
    manifest_from_data,
    manifest_row_from_scenes,
    render_manifest,
)


def test_bundled_manifest():
    manifest = load_manifest_file(DATA_DIR / 'manifest.json')
    assert [row.asset_name for row in manifest.rows] == ['BEHAVIOR', 'ReplicaCAD']
    assert manifest.rows[0].counts == (15, 100, 391, 1217, 339)
    assert manifest_from_data(manifest.to_dict()) == manifest


def test_plain_table():
    manifest = load_manifest_file(DATA_DIR / 'manifest.json')
    lines = render_manifest(manifest).splitlines()
    assert lines[0].split() == ['Asset', 'Apt.', 'Rm.', 'Cat.', 'Obj.', 'A.O.']
    assert lines[2].split() == ['ReplicaCAD', '1', '1', '41', '1201', '8']
    assert len({len(line) for line in lines}) == 1


def test_markdown_bolds_column_maxima():
    manifest = Manifest((
        ManifestRow('a', 2, 10, 5, 100, 7),
        ManifestRow('b', 2, 12, 3, 90, 7),
        ManifestRow('c', 1, 4, 5, 120, 0),
    ))
    lines = render_manifest(manifest, markdown=True).splitlines()
    assert lines[0] == '| Asset | Apt. | Rm. | Cat. | Obj. | A.O. |'
    assert lines[1] == '|---|---:|---:|---:|---:|---:|'
    assert lines[2] == '| a | **2** | 10 | **5** | 100 | **7** |'
    assert lines[3] == '| b | **2** | **12** | 3 | 90 | **7** |'
    assert lines[4] == '| c | 1 | 4 | **5** | **120** | 0 |'


def test_row_from_scenes(apartment):
    row = manifest_row_from_scenes('apartment_0', [apartment])
    assert row.counts == (1, 3, 18, 20, 3)


def test_row_from_two_scenes(apartment, empty_kitchen):
    row = manifest_row_from_scenes('both', [apartment, empty_kitchen])
    assert row.apartment_count == 2
    assert row.object_count == 21
    assert row.category_count == 18


@pytest.mark.parametrize('counts', [
    (1, 1, 1, 1, 2),
    (-1, 1, 1, 1, 0),
    (1, True, 1, 1, 0),
    (1, 1.5, 1, 1, 0),
])
def test_invalid_row(counts):
    with pytest.raises(ValueError):
        ManifestRow('x', *counts)


@pytest.mark.parametrize('data,fragment', [
    ({'asset_name': 'x'}, 'JSON-массивом'),
    ([['x', 1, 1, 1, 1, 0]], 'объектом'),
    ([{'asset_name': 'x', 'apartment_count': 1}], 'room_count'),
    ([{'asset_name': 'x', 'apartment_count': 1, 'room_count': 1, 'category_count': 1,
       'object_count': 1, 'articulated_object_count': 5}], 'articulated_object_count'),
])
def test_malformed_manifest(data, fragment):
    with pytest.raises(FormatError) as exc:
        manifest_from_data(data)
    assert fragment in exc.value.reason


def test_malformed_json_location():
    with pytest.raises(FormatError) as exc:
        load_manifest('[\n  {"asset_name": }\n]', 'm.json')
    assert exc.value.location.startswith('m.json:2:')


def test_error_names_the_row():
    data = json.loads((DATA_DIR / 'manifest.json').read_text(encoding='utf-8'))
    data[1]['object_count'] = -3
    with pytest.raises(FormatError) as exc:
        manifest_from_data(data, 'manifest.json')
    assert exc.value.location == 'manifest.json: [1]'
