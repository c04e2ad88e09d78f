"""Fixtures partagées : scénarios et corpus figé de dictionnaires."""

import pytest

from common.radio import ChannelStats, Codebook

UNIT = ChannelStats(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
DEFAULT = ChannelStats(mean_bc=1.0, mean_bd=0.5, mean_dd=1.0, mean_dc=0.5, mean_be=0.5, mean_de=0.5)
ASYMMETRIC = ChannelStats(mean_bc=2.0, mean_bd=0.3, mean_dd=1.5, mean_dc=0.2, mean_be=0.4, mean_de=0.8)

SCENARIOS = {'unit': UNIT, 'default': DEFAULT, 'asymmetric': ASYMMETRIC}

# (frontières BC, puissances BC, débits secrets BC, frontières DD, puissances DD)
CORPUS = {
    'm2n2': ([0.5], [2.0], [0.3], [0.4], [3.0]),
    'm3n2': ([0.3, 1.2], [1.5, 3.0], [0.1, 0.8], [0.6], [2.0]),
    'm2n3': ([0.8], [1.0], [0.2], [0.2, 1.0], [1.0, 4.0]),
    'm5n3': ([0.2, 0.5, 1.0, 2.0], [0.5, 1.0, 2.0, 3.0], [0.0, 0.1, 0.5, 1.0], [0.3, 1.5], [2.0, 1.0]),
    'm3n5': ([0.4, 1.5], [2.0, 0.0], [0.4, 0.0], [0.1, 0.4, 0.9, 2.0], [0.5, 1.5, 3.0, 2.0]),
    'm4n4': ([0.3, 0.8, 1.8], [1.0, 2.0, 3.0], [0.1, 0.5, 1.2], [0.25, 0.7, 1.6], [1.0, 2.5, 4.0]),
}

# Dictionnaires compatibles avec le retour bruité (M et N puissances de deux)
NOISY_CORPUS = ('m2n2', 'm4n4')


def make_codebook(name: str) -> Codebook:
    return Codebook.from_arrays(*CORPUS[name])


@pytest.fixture(params=sorted(CORPUS))
def corpus_codebook(request) -> Codebook:
    return make_codebook(request.param)


@pytest.fixture(params=NOISY_CORPUS)
def noisy_codebook(request) -> Codebook:
    return make_codebook(request.param)


@pytest.fixture(params=sorted(SCENARIOS))
def scenario(request) -> ChannelStats:
    return SCENARIOS[request.param]


@pytest.fixture
def m2n2() -> Codebook:
    return make_codebook('m2n2')


@pytest.fixture
def m4n4() -> Codebook:
    return make_codebook('m4n4')
