import math

import numpy as np
import pytest

from common.errors import CodebookError, DomainError
from common.metrics import MetricsReport
from common.radio import Codebook, Constraints, first_index, region_index, region_probabilities, region_probability, validate

from conftest import DEFAULT, SCENARIOS


@pytest.mark.parametrize('h, expected', [(0.0, 0), (0.99, 0), (1.0, 1), (1.5, 1), (2.0, 2), (50.0, 2)])
def test_region_index_left_closed(h, expected):
    assert region_index([1.0, 2.0], h) == expected


def test_region_index_vectorized_and_errors():
    assert list(region_index([1.0, 2.0], np.array([0.5, 1.0, 3.0]))) == [0, 1, 2]
    with pytest.raises(DomainError):
        region_index([1.0], math.nan)
    with pytest.raises(DomainError):
        region_index([1.0], -0.1)


def test_region_probability():
    assert region_probability(1.0, 0.0, math.inf) == pytest.approx(1.0)
    assert region_probability(2.0, 1.0, 3.0) == pytest.approx(math.exp(-0.5) - math.exp(-1.5))
    with pytest.raises(DomainError):
        region_probability(1.0, 2.0, 2.0)
    with pytest.raises(DomainError):
        region_probability(0.0, 0.0, 1.0)


def test_region_probabilities_sum_to_one(corpus_codebook):
    for stats in SCENARIOS.values():
        g_bc = region_probabilities(corpus_codebook.bc_boundaries, stats.mean_bc)
        g_dd = region_probabilities(corpus_codebook.dd_boundaries, stats.mean_dd)
        assert len(g_bc) == corpus_codebook.M and len(g_dd) == corpus_codebook.N
        assert abs(g_bc.sum() - 1.0) < 1e-12
        assert abs(g_dd.sum() - 1.0) < 1e-12


def test_corpus_is_valid(corpus_codebook):
    assert validate(corpus_codebook) == []


def test_silent_region_zero(m2n2):
    assert m2n2.bc_powers()[0] == 0.0
    assert m2n2.bc_rates()[0] == 0.0
    assert m2n2.dd_rates()[0] == 0.0
    assert m2n2.bc_rates()[1] == pytest.approx(1.0)
    assert first_index('silent') == 0 and first_index('dropped') == 1
    with pytest.raises(DomainError):
        first_index('other')


def test_validate_reports_unsorted_boundaries():
    cb = Codebook.from_arrays([1.0, 0.5], [1.0, 1.0], [0.0, 0.0], [0.3], [1.0])
    messages = [v.message for v in validate(cb)]
    assert "non-increasing boundary at index 1" in messages


def test_validate_reports_negative_equivocation():
    cb = Codebook.from_arrays([0.5], [2.0], [1.5], [0.3], [1.0])
    violations = validate(cb)
    assert [v.invariant for v in violations] == ['equivocation']
    assert violations[0].message == "negative equivocation rate at 1"


def test_validate_reports_negative_power():
    cb = Codebook.from_arrays([0.5], [1.0], [0.0], [0.3], [-1.0])
    assert [v.invariant for v in validate(cb)] == ['dd_power']


def test_json_round_trip(corpus_codebook, tmp_path):
    assert Codebook.from_json(corpus_codebook.to_json()) == corpus_codebook
    path = tmp_path / 'cb.json'
    corpus_codebook.save(path)
    assert Codebook.load(path) == corpus_codebook


@pytest.mark.parametrize('text', ['{', '[]', '{"bc_boundaries": [1.0]}', '{"bc_boundaries": [], "dd_boundaries": [], '
                                  '"bc_words": [{"p": "x"}], "dd_words": []}'])
def test_malformed_json_raises(text):
    with pytest.raises(CodebookError):
        Codebook.from_json(text)


def test_from_arrays_checks_lengths():
    with pytest.raises(CodebookError):
        Codebook.from_arrays([0.5, 1.0], [1.0], [0.0], [0.3], [1.0])


def test_constraints_slacks():
    constraints = Constraints(r_s_c_min=0.1, outage_max=0.1, p_c_max=2.0, p_d_max=5.0)
    report = MetricsReport(avg_power_c=1.5, avg_power_d=6.0, avg_secrecy_rate_c=0.3, avg_rate_d=1.0, outage_codebook=0.05)
    slacks = constraints.slacks(report)
    assert slacks == pytest.approx({'slack_rate': 0.2, 'slack_outage': 0.05, 'slack_pc': 0.5, 'slack_pd': -1.0})
    assert not constraints.is_satisfied(report)
    with pytest.raises(DomainError):
        Constraints(0.1, 1.5, 1.0, 1.0)


def test_default_scenario_fixture_matches_defaults():
    assert DEFAULT.to_dict() == {'mean_bc': 1.0, 'mean_bd': 0.5, 'mean_dd': 1.0,
                                 'mean_dc': 0.5, 'mean_be': 0.5, 'mean_de': 0.5}
