import csv
import json

import pytest
import yaml

import main
from commands.sweep.experiment import RESULTS_COLUMNS, TIMINGS_COLUMNS
from commands.verify.verify import verify_codebook
from common import dataio
from common.config import parse_config
from common.radio import Codebook

from conftest import make_codebook

TINY = {
    'codebook_dims': {'M': 2, 'N': 2},
    'pso': {'n_pop': 6, 'max_it': 5, 'log_every': 0},
    'mc': {'n_samples': 2000, 'n_batches': 10},
}


def _write_config(path, **sections):
    data = {**TINY, **sections}
    path.write_text(yaml.safe_dump(data, sort_keys=False), encoding='utf-8')
    return path


def _read_csv(path) -> list[dict]:
    with path.open(encoding='utf-8') as f:
        return list(csv.DictReader(f))


def _header(path) -> str:
    return path.read_text(encoding='utf-8').splitlines()[0]


@pytest.fixture
def tiny_config(tmp_path):
    return _write_config(tmp_path / 'tiny.yaml')


def _sweep(config, out_dir, *extra) -> int:
    return main.main(['sweep', str(config), '--out-dir', str(out_dir), '--workers', '1', *extra])


# SWEEP -----------------------------------------------------------

def test_single_point_artifacts(tiny_config, tmp_path):
    out = tmp_path / 'run'
    assert _sweep(tiny_config, out) == 0
    assert _header(out / 'results.csv') == ','.join(RESULTS_COLUMNS)
    assert _header(out / 'timings.csv') == ','.join(TIMINGS_COLUMNS)
    rows = _read_csv(out / 'results.csv')
    assert len(rows) == 1
    assert rows[0]['axis'] == '' and rows[0]['seed'] == '0'
    assert rows[0]['feasible'] in ('true', 'false')
    trace = _read_csv(out / 'trace_0.csv')
    assert [int(r['iter']) for r in trace] == list(range(6))
    costs = [float(r['gbest_cost']) for r in trace]
    assert costs == sorted(costs)
    assert isinstance(dataio.read_codebook(out / 'codebook_0.json'), Codebook)
    manifest = dataio.read_manifest(out / 'manifest.json')
    assert manifest['command'] == 'sweep' and manifest['points'] == 1
    assert dataio.release_instance(out) == []


def test_rerun_is_byte_identical(tiny_config, tmp_path):
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert _sweep(tiny_config, first) == 0
    assert _sweep(tiny_config, second) == 0
    for name in ('results.csv', 'trace_0.csv', 'codebook_0.json', 'manifest.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_manifest_replays_run(tiny_config, tmp_path):
    first, replay = tmp_path / 'a', tmp_path / 'replay'
    assert _sweep(tiny_config, first) == 0
    assert _sweep(first / 'manifest.json', replay) == 0
    assert (first / 'results.csv').read_bytes() == (replay / 'results.csv').read_bytes()


def test_tampered_manifest_is_rejected(tiny_config, tmp_path):
    first = tmp_path / 'a'
    assert _sweep(tiny_config, first) == 0
    manifest = json.loads((first / 'manifest.json').read_text())
    manifest['config']['pso']['max_it'] = 7
    (first / 'manifest.json').write_text(json.dumps(manifest))
    assert _sweep(first / 'manifest.json', tmp_path / 'b') == 2


def test_sweep_rows_follow_axis_then_seed(tmp_path):
    config = _write_config(tmp_path / 'sweep.yaml', sweep={'axis': 'p_d_max', 'values': [0.0, 10.0], 'seeds': [0, 1]})
    out = tmp_path / 'run'
    assert _sweep(config, out) == 0
    rows = _read_csv(out / 'results.csv')
    assert [(r['axis'], float(r['value']), int(r['seed'])) for r in rows] == [
        ('p_d_max', 0.0, 0), ('p_d_max', 0.0, 1), ('p_d_max', 10.0, 0), ('p_d_max', 10.0, 1)]
    assert [r['point'] for r in _read_csv(out / 'timings.csv')] == ['0', '1', '2', '3']
    assert all((out / f'trace_{k}.csv').exists() for k in range(4))


def test_seed_option_overrides_seeds(tiny_config, tmp_path):
    out = tmp_path / 'run'
    assert _sweep(tiny_config, out, '--seed', '7') == 0
    assert [r['seed'] for r in _read_csv(out / 'results.csv')] == ['7']


def test_infeasible_point_is_flagged(tmp_path):
    config = _write_config(tmp_path / 'hard.yaml',
                           constraints={'r_s_c_min': 5.0, 'p_c_max': 0.001, 'p_d_max': 0.001})
    out = tmp_path / 'run'
    assert _sweep(config, out) == 0
    row = _read_csv(out / 'results.csv')[0]
    assert row['feasible'] == 'false'
    assert float(row['slack_rate']) < 0


def test_parametric_cdi_fills_rate_gap(tmp_path):
    config = _write_config(tmp_path / 'cdi.yaml', cdi={'mode': 'parametric', 'delta': 0.2})
    out = tmp_path / 'run'
    assert _sweep(config, out) == 0
    gap = _read_csv(out / 'results.csv')[0]['rate_gap']
    assert gap == '' or float(gap) >= 0.0


# ERREURS ---------------------------------------------------------

def test_bad_config_exits_with_two(tmp_path, capsys):
    config = tmp_path / 'bad.yaml'
    config.write_text('pso:\n  n_popp: 3\n')
    assert _sweep(config, tmp_path / 'run') == 2
    assert 'pso.n_popp' in capsys.readouterr().err


def test_missing_config_exits_with_two(tmp_path):
    assert _sweep(tmp_path / 'absent.yaml', tmp_path / 'run') == 2


def test_invalid_workers_exits_with_two(tiny_config, tmp_path):
    assert main.main(['sweep', str(tiny_config), '--out-dir', str(tmp_path), '--workers', '0']) == 2


# VERIFY ----------------------------------------------------------

def test_verify_writes_report(tiny_config, tmp_path):
    codebook = tmp_path / 'cb.json'
    make_codebook('m2n2').save(codebook)
    out = tmp_path / 'verify'
    assert main.main(['verify', str(codebook), str(tiny_config), '--out-dir', str(out), '--workers', '1']) == 0
    report = json.loads((out / 'verify.json').read_text())
    assert [m['metric'] for m in report['metrics']] == ['avg_power_c', 'avg_power_d', 'avg_secrecy_rate_c',
                                                       'avg_rate_d', 'outage_codebook']
    assert isinstance(report['all_pass'], bool)
    assert set(report['slacks']) == {'slack_rate', 'slack_outage', 'slack_pc', 'slack_pd'}


@pytest.mark.parametrize('content', ['{not json', json.dumps({
    'bc_boundaries': [0.5], 'dd_boundaries': [0.4],
    'bc_words': [{'p': 2.0, 'rs': 1.5}], 'dd_words': [{'p': 3.0}]})])
def test_verify_rejects_bad_codebook(tiny_config, tmp_path, content, capsys):
    codebook = tmp_path / 'cb.json'
    codebook.write_text(content)
    assert main.main(['verify', str(codebook), str(tiny_config), '--out-dir', str(tmp_path / 'v')]) == 2
    assert capsys.readouterr().err


def test_noiseless_feedback_verifies_like_error_free(m4n4):
    exact = verify_codebook(m4n4, parse_config(yaml.safe_dump(TINY)), seed=1)
    noisy = verify_codebook(m4n4, parse_config(yaml.safe_dump({**TINY, 'noise': {'enabled': True, 'q_c': 0.0, 'q_d': 0.0}})), seed=1)
    assert noisy['mode'] == 'noisy' and exact['mode'] == 'error-free'
    for a, b in zip(exact['metrics'], noisy['metrics']):
        assert b['analytic'] == pytest.approx(a['analytic'], abs=1e-6)


# MC / DESIGN -----------------------------------------------------

def test_mc_with_codebook(tiny_config, tmp_path):
    codebook = tmp_path / 'cb.json'
    make_codebook('m2n2').save(codebook)
    out = tmp_path / 'mc'
    assert main.main(['mc', str(tiny_config), '--codebook', str(codebook), '--out-dir', str(out), '--seed', '2']) == 0
    assert _header(out / 'mc.csv') == 'metric,value,se,n'
    rows = _read_csv(out / 'mc.csv')
    assert len(rows) == 5 and all(int(r['n']) == 2000 for r in rows)


def test_mc_designs_when_no_codebook(tiny_config, tmp_path):
    out = tmp_path / 'mc'
    assert main.main(['mc', str(tiny_config), '--out-dir', str(out), '--workers', '1']) == 0
    assert (out / 'codebook_0.json').exists()
    assert (out / 'mc.csv').exists()


def test_design_command(tiny_config, tmp_path, capsys):
    out = tmp_path / 'design'
    assert main.main(['design', str(tiny_config), '--out-dir', str(out), '--workers', '1']) == 0
    assert dataio.read_manifest(out / 'manifest.json')['command'] == 'design'
    assert 'avg_rate_d' in capsys.readouterr().out


# TENDANCES -------------------------------------------------------

TREND = {
    'codebook_dims': {'M': 4, 'N': 4},
    'pso': {'n_pop': 30, 'max_it': 300, 'log_every': 0},
    'mc': {'n_samples': 2000, 'n_batches': 10},
}
SLACK = 0.01


def _trend_rates(tmp_path, axis, values, **sections) -> list[tuple[float, bool]]:
    data = {**TREND, **sections, 'sweep': {'axis': axis, 'values': values, 'seeds': [0]}}
    config = tmp_path / f'{axis}.yaml'
    config.write_text(yaml.safe_dump(data, sort_keys=False), encoding='utf-8')
    out = tmp_path / f'run_{axis}'
    assert main.main(['sweep', str(config), '--out-dir', str(out), '--workers', '4']) == 0
    return [(float(r['avg_rate_d']), r['feasible'] == 'true') for r in _read_csv(out / 'results.csv')]


def _assert_monotone(rates: list[tuple[float, bool]], direction: int) -> None:
    feasible = [rate for rate, ok in rates if ok]
    assert len(feasible) >= 2, rates
    for low, high in zip(feasible, feasible[1:]):
        assert direction * (high - low) >= -SLACK * max(low, high), rates


@pytest.mark.slow
@pytest.mark.parametrize('axis, values, direction', [
    ('outage_max', [0.02, 0.05, 0.1, 0.2], 1),
    ('r_s_c_min', [0.05, 0.1, 0.2, 0.4], -1),
    ('q', [0.0, 0.1, 0.25], -1),
    ('bits', [1, 2, 3], 1),
], ids=['outage_max', 'r_s_c_min', 'q', 'bits'])
def test_rate_trend_along_axis(tmp_path, axis, values, direction):
    _assert_monotone(_trend_rates(tmp_path, axis, values), direction)


@pytest.mark.slow
def test_rate_grows_then_flattens_with_d2d_power_limit(tmp_path):
    last_gains = []
    for outage_max in (0.02, 0.1):
        folder = tmp_path / f'outage_{outage_max}'
        folder.mkdir()
        rates = _trend_rates(folder, 'p_d_max', [0.0, 4.0, 8.0, 12.0], constraints={'outage_max': outage_max})
        _assert_monotone(rates, 1)
        (before, _), (last, _) = rates[-2:]
        last_gains.append((last - before) / last if last > 0 else 0.0)
    assert min(last_gains) < SLACK, last_gains
