import math

import numpy as np
import pytest
from scipy.stats import kstest

from common.errors import DomainError
from common.radio import (
    LINKS,
    ChannelStats,
    LinkGeometry,
    draw_positions,
    exp_cdf,
    exp_pdf,
    exp_quantile,
    make_rng,
    mean_from_geometry,
    sample,
    scenario_from_geometry,
    spawn_rngs,
)

from conftest import ASYMMETRIC, DEFAULT


def test_exp_pdf_values():
    assert exp_pdf(0.0, 2.0) == pytest.approx(0.5)
    assert exp_pdf(1.0, 1.0) == pytest.approx(math.exp(-1.0))
    assert np.allclose(exp_pdf(np.array([0.0, 2.0]), 2.0), [0.5, 0.5 * math.exp(-1.0)])


@pytest.mark.parametrize('mean', [0.0, -1.0, math.nan, math.inf])
def test_exp_pdf_rejects_bad_mean(mean):
    with pytest.raises(DomainError):
        exp_pdf(1.0, mean)


def test_exp_cdf_and_quantile_are_inverse():
    for prob in (0.0, 0.1, 0.5, 0.999):
        assert exp_cdf(exp_quantile(prob, 3.0), 3.0) == pytest.approx(prob, abs=1e-12)
    assert exp_cdf(-1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        exp_quantile(1.0, 1.0)


def test_channel_stats_validation_and_access():
    assert DEFAULT.mean('dd') == 1.0
    assert ChannelStats.from_dict(ASYMMETRIC.to_dict()) == ASYMMETRIC
    assert DEFAULT.scaled(2.0).mean_bd == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ChannelStats(1.0, 1.0, 0.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        DEFAULT.mean('xy')


def test_mean_from_geometry():
    assert mean_from_geometry(LinkGeometry(1.0, 1.0, 4.0, 0.0)) == pytest.approx(1.0)
    assert mean_from_geometry(LinkGeometry(10.0, 1.0, 4.0, 8.0)) == pytest.approx(1e-4)
    assert mean_from_geometry(LinkGeometry(10.0, 1.0, 2.0, 8.0), 10.0) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        LinkGeometry(0.0)


def test_draw_positions_inside_disc():
    points = draw_positions(make_rng(1), 5000, 100.0)
    assert points.shape == (5000, 2)
    assert np.all(np.hypot(points[:, 0], points[:, 1]) <= 100.0)


def test_scenario_from_geometry_is_seeded():
    a = scenario_from_geometry(make_rng(7))
    b = scenario_from_geometry(make_rng(7))
    assert a == b
    assert all(a.mean(k) > 0 for k in LINKS)


def test_sample_follows_exponential_law():
    h = sample(ASYMMETRIC, make_rng(3), 20000)
    assert len(h) == 20000
    for link in LINKS:
        values = getattr(h, f'h_{link}') / ASYMMETRIC.mean(link)
        assert kstest(values, 'expon').pvalue > 1e-3


def test_rng_streams_are_reproducible():
    assert np.array_equal(make_rng(5).random(10), make_rng(5).random(10))
    first, second = spawn_rngs(5, 2)
    assert not np.array_equal(first.random(10), second.random(10))
