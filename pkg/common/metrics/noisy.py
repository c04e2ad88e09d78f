"""### Metrics > Noisy
Retour d'information bruité : canal binaire symétrique sur les bits d'indice et
versions bruitées de toutes les métriques.

Convention : rho[i, j] = Pr(indice reçu i | indice envoyé j). L'émetteur applique
le mot de code de l'indice reçu (décodé) alors que le canal est dans la région vraie."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.errors import DomainError
from common.radio.channel import ChannelStats
from common.radio.codebook import Codebook, first_index, region_probabilities
from .errorfree import d2d_cells, evaluate_metrics, secrecy_cells, success_cells
from .quadrature import DEFAULT_EPSABS, DEFAULT_EPSREL
from .report import MetricsReport

logger = logging.getLogger('D2DSEC.metrics.noisy')

# MODELE BSC ------------------------------------------------------

def _bits_for(size: int) -> int:
    bits = int(size).bit_length() - 1
    if size < 2 or (1 << bits) != size:
        raise DomainError(f"Le nombre de régions ({size}) doit être une puissance de deux >= 2 avec retour bruité")
    return bits

def hamming(a: int, b: int, bits: int) -> int:
    """Distance de Hamming entre deux indices codés sur `bits` bits.

    Raises:
        DomainError: Indice hors de [0, 2^bits)
    """
    for v in (a, b):
        if not 0 <= v < (1 << bits):
            raise DomainError(f"Indice {v} hors de [0, {1 << bits})")
    return bin(a ^ b).count('1')

def transition_matrix(q: float, bits: int) -> np.ndarray:
    """Matrice rho[i, j] = q^d(i,j)·(1-q)^(bits-d(i,j)) des transitions d'indices."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"Probabilité de croisement hors de [0, 1] : {q}")
    labels = np.arange(1 << bits)
    xor = labels[:, None] ^ labels[None, :]
    distance = sum((xor >> k) & 1 for k in range(bits))
    return np.power(q, distance) * np.power(1.0 - q, bits - distance)


@dataclass(frozen=True)
class FeedbackNoise:
    """Probabilités de croisement des deux voies de retour."""
    q_c: float
    q_d: float

    def __post_init__(self):
        for name in ('q_c', 'q_d'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise DomainError(f"{name} hors de [0, 1]")

    def matrix_c(self, M: int) -> np.ndarray:
        return transition_matrix(self.q_c, _bits_for(M))

    def matrix_d(self, N: int) -> np.ndarray:
        return transition_matrix(self.q_d, _bits_for(N))

    def to_dict(self) -> dict:
        return {'q_c': self.q_c, 'q_d': self.q_d}

# METRIQUES BRUITEES ----------------------------------------------

def _weights(rho: np.ndarray, g: np.ndarray, start: int) -> np.ndarray:
    """w[i] = Σ_{j >= start} rho[i, j]·G[j] : probabilité de décoder i."""
    return rho[:, start:] @ g[start:]

def avg_power_c_noisy(cb: Codebook, stats: ChannelStats, noise: FeedbackNoise, *, region_zero: str = 'silent') -> float:
    """Σ_m Σ_m' rho[m, m']·G^BC_m'·p^BC(m)."""
    g = region_probabilities(cb.bc_boundaries, stats.mean_bc)
    w = _weights(noise.matrix_c(cb.M), g, first_index(region_zero))
    return float(w[1:] @ cb.bc_powers()[1:])

def avg_power_d_noisy(cb: Codebook, stats: ChannelStats, noise: FeedbackNoise, *, region_zero: str = 'silent') -> float:
    """Σ_n Σ_n' rho[n, n']·G^DD_n'·p^DD(n)."""
    g = region_probabilities(cb.dd_boundaries, stats.mean_dd)
    w = _weights(noise.matrix_d(cb.N), g, first_index(region_zero))
    return float(w[1:] @ cb.dd_powers()[1:])

def _secrecy_noisy_by_region(cb, stats, noise, region_zero, secrecy_event, restrict, **tol) -> np.ndarray:
    rho = noise.matrix_c(cb.M)
    start = first_index(region_zero)
    pairs = [(m, mt) for m in range(1, cb.M) for mt in range(start, cb.M) if not restrict or mt >= m]
    out = np.zeros(cb.M)
    if not pairs:
        return out
    m_dec, m_true = (np.array(v) for v in zip(*pairs))
    cells = secrecy_cells(cb, stats, m_dec, m_true, secrecy_event=secrecy_event, **tol)
    np.add.at(out, m_dec, rho[m_dec, m_true] * cells * cb.bc_secrecy_rates()[m_dec])
    return out

def avg_secrecy_rate_c_noisy(cb: Codebook, stats: ChannelStats, noise: FeedbackNoise, *,
                             region_zero: str = 'silent',
                             secrecy_event: str = 'capacity',
                             restrict: bool = True,
                             **tol) -> float:
    """Σ_m Σ_{m' >= m} rho[m, m']·Pr(h^BC ∈ R_m', secret avec le mot m)·r_S(m).

    Args:
        restrict: Si `False`, somme sur tous les m' (forme générale, les termes m' < m
            sont nuls car le lien n'est alors jamais fiable)
    """
    return float(_secrecy_noisy_by_region(cb, stats, noise, region_zero, secrecy_event, restrict, **tol).sum())

def _rate_d_noisy_by_region(cb, stats, noise, region_zero, **tol) -> np.ndarray:
    start = first_index(region_zero)
    out = np.zeros(cb.N)
    if cb.N < 2 or start >= cb.M:
        return out
    w_c = _weights(noise.matrix_c(cb.M), region_probabilities(cb.bc_boundaries, stats.mean_bc), start)
    rho_d = noise.matrix_d(cb.N)
    grid = np.meshgrid(np.arange(start, cb.M), np.arange(1, cb.N), np.arange(start, cb.N), indexing='ij')
    m_dec, n_dec, n_true = (g.ravel() for g in grid)
    cells = d2d_cells(cb, stats, m_dec, n_dec, n_true, **tol)
    terms = w_c[m_dec] * rho_d[n_dec, n_true] * cells * cb.dd_rates()[n_dec]
    np.add.at(out, n_dec, terms)
    return out

def avg_rate_d_noisy(cb: Codebook, stats: ChannelStats, noise: FeedbackNoise, *, region_zero: str = 'silent', **tol) -> float:
    """Somme quadruple sur (m, m', n, n') du débit D2D fiable sous retour bruité."""
    return float(_rate_d_noisy_by_region(cb, stats, noise, region_zero, **tol).sum())

def _outage_noisy_by_region(cb, stats, noise, region_zero, **tol) -> np.ndarray:
    start = first_index(region_zero)
    out = np.zeros(cb.M)
    if cb.M < 2 or start >= cb.N:
        return out
    rho_c = noise.matrix_c(cb.M)
    g_bc = region_probabilities(cb.bc_boundaries, stats.mean_bc)
    w_d = _weights(noise.matrix_d(cb.N), region_probabilities(cb.dd_boundaries, stats.mean_dd), start)
    grid = np.meshgrid(np.arange(1, cb.M), np.arange(start, cb.M), np.arange(start, cb.N), indexing='ij')
    m_dec, m_true, n_dec = (g.ravel() for g in grid)
    success = success_cells(cb, stats, m_dec, m_true, n_dec, **tol)
    terms = rho_c[m_dec, m_true] * g_bc[m_true] * w_d[n_dec] * (1.0 - success)
    np.add.at(out, m_dec, terms)
    return out

def outage_codebook_noisy(cb: Codebook, stats: ChannelStats, noise: FeedbackNoise, *, region_zero: str = 'silent', **tol) -> float:
    """Outage du dictionnaire cellulaire quand les deux voies de retour sont bruitées."""
    return float(np.clip(_outage_noisy_by_region(cb, stats, noise, region_zero, **tol).sum(), 0.0, 1.0))

def evaluate_metrics_noisy(cb: Codebook, stats: ChannelStats, noise: FeedbackNoise, *,
                           region_zero: str = 'silent',
                           secrecy_event: str = 'capacity',
                           epsabs: float = DEFAULT_EPSABS,
                           epsrel: float = DEFAULT_EPSREL) -> MetricsReport:
    """Évalue les cinq métriques bruitées (détails indexés par région décodée)."""
    tol = {'epsabs': epsabs, 'epsrel': epsrel}
    start = first_index(region_zero)
    w_c = _weights(noise.matrix_c(cb.M), region_probabilities(cb.bc_boundaries, stats.mean_bc), start)
    w_d = _weights(noise.matrix_d(cb.N), region_probabilities(cb.dd_boundaries, stats.mean_dd), start)
    power_c = np.concatenate(([0.0], w_c[1:] * cb.bc_powers()[1:]))
    power_d = np.concatenate(([0.0], w_d[1:] * cb.dd_powers()[1:]))
    secrecy = _secrecy_noisy_by_region(cb, stats, noise, region_zero, secrecy_event, True, **tol)
    rate_d = _rate_d_noisy_by_region(cb, stats, noise, region_zero, **tol)
    outage = _outage_noisy_by_region(cb, stats, noise, region_zero, **tol)
    return MetricsReport(
        avg_power_c=float(power_c.sum()),
        avg_power_d=float(power_d.sum()),
        avg_secrecy_rate_c=float(secrecy.sum()),
        avg_rate_d=float(rate_d.sum()),
        outage_codebook=float(np.clip(outage.sum(), 0.0, 1.0)),
        mode='noisy',
        region_zero=region_zero,
        secrecy_event=secrecy_event,
        qc=noise.q_c,
        qd=noise.q_d,
        breakdowns={
            'power_c': tuple(power_c.tolist()),
            'power_d': tuple(power_d.tolist()),
            'secrecy_rate_c': tuple(secrecy.tolist()),
            'outage_c': tuple(outage.tolist()),
            'rate_d': tuple(rate_d.tolist()),
        },
    )

# EVALUATION ------------------------------------------------------

def evaluate(cb: Codebook, stats: ChannelStats, noise: Optional[FeedbackNoise] = None, **options) -> MetricsReport:
    """Évalue le dictionnaire avec le modèle de retour adapté (sans erreur si `noise` est None)."""
    if noise is None:
        return evaluate_metrics(cb, stats, **options)
    return evaluate_metrics_noisy(cb, stats, noise, **options)
