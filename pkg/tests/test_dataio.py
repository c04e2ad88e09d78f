import json

import pytest

from common import dataio
from common.errors import CodebookError

from conftest import make_codebook


def test_instance_is_cached_per_folder(tmp_path):
    first = dataio.get_instance(tmp_path / 'a')
    assert dataio.get_instance(tmp_path / 'a') is first
    assert dataio.get_instance(tmp_path / 'b') is not first
    dataio.release_instance(tmp_path / 'a')
    dataio.release_instance(tmp_path / 'b')


def test_release_drops_instance_and_written_files(tmp_path):
    run_data = dataio.get_instance(tmp_path)
    path = run_data.write_json('data.json', {'x': 1})
    assert dataio.release_instance(tmp_path) == [path]
    assert run_data.written == []
    fresh = dataio.get_instance(tmp_path)
    assert fresh is not run_data and fresh.written == []
    assert dataio.release_instance(tmp_path) == []
    assert dataio.release_instance(tmp_path / 'absent') == []


def test_csv_cells_are_stable(tmp_path):
    run_data = dataio.get_instance(tmp_path)
    path = run_data.write_csv('t.csv', ('a', 'b', 'c', 'd'), [(0.1, True, None, 3)])
    assert path.read_text(encoding='utf-8') == 'a,b,c,d\n0.1,true,,3\n'
    with pytest.raises(ValueError):
        run_data.write_csv('t.csv', ('a',), [(1, 2)])
    dataio.release_instance(tmp_path)


def test_manifest_hash_detects_changes(tmp_path):
    run_data = dataio.get_instance(tmp_path)
    path = run_data.write_manifest({'pso': {'n_pop': 6}}, command='sweep', extra={'points': 1})
    assert dataio.read_manifest(path)['points'] == 1
    manifest = json.loads(path.read_text())
    manifest['config']['pso']['n_pop'] = 7
    path.write_text(json.dumps(manifest))
    with pytest.raises(ValueError):
        dataio.read_manifest(path)
    dataio.release_instance(tmp_path)


def test_read_codebook_validates(tmp_path):
    path = tmp_path / 'cb.json'
    make_codebook('m3n2').save(path)
    assert dataio.read_codebook(path) == make_codebook('m3n2')
    path.write_text('[]')
    with pytest.raises(CodebookError):
        dataio.read_codebook(path)
