"""### Montecarlo > Oracle
Oracle de simulation directe du protocole : tirage des canaux, quantification, retour
(éventuellement bruité), application des mots de code et test des événements de capacité.

Ce module n'utilise aucune formule fermée des métriques : seules les définitions
des capacités et des événements de fiabilité/secret interviennent."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

from common.errors import DomainError
from common.metrics.errorfree import EffectiveGainSpec, capacity
from common.metrics.noisy import FeedbackNoise
from common.metrics.report import METRIC_NAMES, SECRECY_EVENTS
from common.radio.channel import ChannelSample, ChannelStats, make_rng, sample
from common.radio.codebook import Codebook, first_index, region_index

logger = logging.getLogger('D2DSEC.montecarlo.oracle')

# CONSTANTES ------------------------------------------------------

MIN_SAMPLES = 1000
MIN_REGION_MASS = 1e-9
MAX_CHUNK = 1 << 22

# CONFIGURATION ---------------------------------------------------

@dataclass(frozen=True)
class McConfig:
    """Paramètres de simulation : taille, nombre de lots, graine, multiplicateur de confiance."""
    n_samples: int = 1_000_000
    n_batches: int = 100
    seed: int = 0
    confidence: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < MIN_SAMPLES:
            raise DomainError(f"n_samples doit être >= {MIN_SAMPLES}")
        if not 1 <= self.n_batches <= self.n_samples:
            raise DomainError(f"n_batches doit être dans [1, n_samples]")
        if self.workers < 1:
            raise DomainError("workers doit être >= 1")

    @property
    def batch_size(self) -> int:
        return self.n_samples // self.n_batches

    def to_dict(self) -> dict:
        return {'n_samples': self.n_samples, 'n_batches': self.n_batches, 'seed': self.seed,
                'confidence': self.confidence}


@dataclass(frozen=True)
class McEstimate:
    """Estimation Monte Carlo : valeur, erreur type et nombre d'échantillons."""
    value: float
    standard_error: float
    n_samples: int

    def __repr__(self) -> str:
        return f'<McEstimate {self.value:.6g} ± {self.standard_error:.2g} (n={self.n_samples})>'

    @classmethod
    def from_batches(cls, batch_means: np.ndarray, batch_size: int) -> 'McEstimate':
        """Moyenne des lots et erreur type par la méthode des moyennes de lots."""
        batch_means = np.asarray(batch_means, dtype=float)
        k = len(batch_means)
        se = float(np.std(batch_means, ddof=1) / math.sqrt(k)) if k > 1 else 0.0
        return cls(float(np.mean(batch_means)), se, k * batch_size)

    def within(self, reference: float, k: float = 3.0, *, atol: float = 1e-12) -> bool:
        """Vrai si |valeur - référence| <= k·SE (+ atol)."""
        return abs(self.value - reference) <= k * self.standard_error + atol


@dataclass(frozen=True)
class McReport:
    """Les cinq métriques estimées par simulation."""
    avg_power_c: McEstimate
    avg_power_d: McEstimate
    avg_secrecy_rate_c: McEstimate
    avg_rate_d: McEstimate
    outage_codebook: McEstimate
    mode: str = 'error-free'
    region_zero: str = 'silent'
    secrecy_event: str = 'capacity'
    qc: float = 0.0
    qd: float = 0.0

    def estimates(self) -> dict[str, McEstimate]:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def rows(self) -> list[list]:
        """Lignes `metric,value,se,n`."""
        return [[name, e.value, e.standard_error, e.n_samples] for name, e in self.estimates().items()]

# ECHANTILLONNEURS ------------------------------------------------

class GainSampler(Protocol):
    def draw(self, rng: np.random.Generator, size: int) -> ChannelSample: ...


@dataclass(frozen=True)
class ExponentialSampler:
    """Gains exponentiels de moyennes données (modèle de Rayleigh)."""
    stats: ChannelStats

    def draw(self, rng: np.random.Generator, size: int) -> ChannelSample:
        return sample(self.stats, rng, size)


def as_sampler(source: ChannelStats | GainSampler) -> GainSampler:
    return ExponentialSampler(source) if isinstance(source, ChannelStats) else source

# PROTOCOLE -------------------------------------------------------

def _flip(indices: np.ndarray, q: float, bits: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse chaque bit d'indice indépendamment avec probabilité q."""
    mask = np.zeros_like(indices)
    for k in range(bits):
        mask |= (rng.random(indices.shape) < q).astype(indices.dtype) << k
    return indices ^ mask

def _bits(size: int) -> int:
    bits = size.bit_length() - 1
    if (1 << bits) != size:
        raise DomainError(f"{size} régions : pas une puissance de deux")
    return bits

def protocol_values(cb: Codebook,
                    h: ChannelSample,
                    rng: np.random.Generator,
                    noise: Optional[FeedbackNoise] = None,
                    *,
                    region_zero: str = 'silent',
                    secrecy_event: str = 'capacity') -> dict[str, np.ndarray]:
    """Joue le protocole échantillon par échantillon et renvoie les valeurs instantanées.

    Returns:
        Dictionnaire {métrique: tableau} dont les moyennes sont les cinq métriques
    """
    if secrecy_event not in SECRECY_EVENTS:
        raise DomainError(f"Événement de secret inconnu : {secrecy_event!r}")
    start = first_index(region_zero)

    m_true = np.asarray(region_index(cb.bc_boundaries, h.h_bc))
    n_true = np.asarray(region_index(cb.dd_boundaries, h.h_dd))
    if noise is not None:
        m_dec = _flip(m_true, noise.q_c, _bits(cb.M), rng)
        n_dec = _flip(n_true, noise.q_d, _bits(cb.N), rng)
    else:
        m_dec, n_dec = m_true, n_true

    p_bc = cb.bc_powers()[m_dec]
    r_bc = cb.bc_rates()[m_dec]
    r_s = cb.bc_secrecy_rates()[m_dec]
    r_e = np.maximum(r_bc - r_s, 0.0)
    p_dd = cb.dd_powers()[n_dec]
    r_dd = cb.dd_rates()[n_dec]

    ok_c = (m_true >= start) & (m_dec >= start)
    ok_d = (n_true >= start) & (n_dec >= start)

    # Secret sans brouillage D2D
    c_bc = capacity(h.h_bc, p_bc)
    c_be = capacity(h.h_be, p_bc)
    reliable = c_bc >= r_bc
    if secrecy_event == 'capacity':
        secure = c_bc - c_be >= r_s
    else:
        secure = c_be <= r_e

    # Outage avec brouillage D2D
    c_bc_eff = capacity(h.h_bc / (1.0 + h.h_dc * p_dd), p_bc)
    c_be_eff = capacity(h.h_be / (1.0 + h.h_de * p_dd), p_bc)
    success = (c_bc_eff >= r_bc) & (c_be_eff <= r_e)

    c_dd_eff = capacity(h.h_dd / (1.0 + h.h_bd * p_bc), p_dd)

    return {
        'avg_power_c': np.where(ok_c, p_bc, 0.0),
        'avg_power_d': np.where(ok_d, p_dd, 0.0),
        'avg_secrecy_rate_c': np.where(ok_c & reliable & secure, r_s, 0.0),
        'avg_rate_d': np.where(ok_c & ok_d & (c_dd_eff >= r_dd), r_dd, 0.0),
        'outage_codebook': (ok_c & ok_d & (m_dec >= 1) & ~success).astype(float),
    }

def _simulate_batch(cb: Codebook, sampler: GainSampler, noise: Optional[FeedbackNoise],
                    region_zero: str, secrecy_event: str, size: int,
                    seed: np.random.SeedSequence) -> np.ndarray:
    rng = make_rng(seed)
    h = sampler.draw(rng, size)
    values = protocol_values(cb, h, rng, noise, region_zero=region_zero, secrecy_event=secrecy_event)
    return np.array([values[name].mean() for name in METRIC_NAMES])

def _run_batches(fn, tasks: list[tuple], workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(fn, *zip(*tasks)))
    return [fn(*task) for task in tasks]

def simulate_metrics(cb: Codebook,
                     source: ChannelStats | GainSampler,
                     noise: Optional[FeedbackNoise] = None,
                     mc: McConfig = McConfig(),
                     *,
                     region_zero: str = 'silent',
                     secrecy_event: str = 'capacity') -> McReport:
    """Estime les cinq métriques par simulation directe du protocole.

    Les lots utilisent des flux dérivés de `mc.seed` ; l'ordre de réduction ne dépend
    pas du nombre de processus.

    Args:
        cb: Dictionnaire
        source: CDI exponentielle ou échantillonneur de gains quelconque
        noise: Modèle de retour bruité (None : sans erreur)
        mc: Paramètres de simulation
    """
    sampler = as_sampler(source)
    children = np.random.SeedSequence(mc.seed).spawn(mc.n_batches)
    tasks = [(cb, sampler, noise, region_zero, secrecy_event, mc.batch_size, child) for child in children]
    logger.debug(f"Simulation de {mc.n_batches} lots de {mc.batch_size} échantillons ({mc.workers} processus)")
    batches = np.array(_run_batches(_simulate_batch, tasks, mc.workers))
    estimates = {name: McEstimate.from_batches(batches[:, i], mc.batch_size) for i, name in enumerate(METRIC_NAMES)}
    return McReport(**estimates,
                    mode='error-free' if noise is None else 'noisy',
                    region_zero=region_zero,
                    secrecy_event=secrecy_event,
                    qc=0.0 if noise is None else noise.q_c,
                    qd=0.0 if noise is None else noise.q_d)

# CONDITIONNEMENT -------------------------------------------------

def _draw_conditioned(rng: np.random.Generator, mean: float, lo: float, hi: float, size: int) -> np.ndarray:
    """Tire `size` gains exponentiels conditionnés à [lo, hi) par rejet."""
    mass = math.exp(-lo / mean) - (0.0 if math.isinf(hi) else math.exp(-hi / mean))
    if mass < MIN_REGION_MASS:
        raise DomainError(f"Région [{lo}, {hi}) de masse {mass:.3g} : rejet impraticable")
    out = np.empty(size)
    filled = 0
    while filled < size:
        chunk = min(MAX_CHUNK, int(1.2 * (size - filled) / mass) + 16)
        draws = rng.exponential(mean, chunk)
        accepted = draws[(draws >= lo) & (draws < hi)][:size - filled]
        out[filled:filled + len(accepted)] = accepted
        filled += len(accepted)
    return out

def simulate_conditional_cdf(spec: EffectiveGainSpec,
                             x_grid: Sequence[float],
                             mc: McConfig = McConfig()) -> list[McEstimate]:
    """CDF empirique de h/(1 + h_int·p) conditionnée à h ∈ [lo, hi), sur une grille.

    Raises:
        DomainError: Région de masse inférieure à 1e-9
    """
    rng = make_rng(mc.seed)
    h = _draw_conditioned(rng, spec.direct_mean, spec.lo, spec.hi, mc.n_samples)
    h_int = rng.exponential(spec.interferer_mean, mc.n_samples)
    eff = h / (1.0 + h_int * spec.interferer_power)
    out = []
    for x in x_grid:
        f = float(np.mean(eff <= x))
        out.append(McEstimate(f, math.sqrt(f * (1.0 - f) / mc.n_samples), mc.n_samples))
    return out

def simulate_success_cell(cb: Codebook, stats: ChannelStats, m: int, n: int, mc: McConfig = McConfig()) -> McEstimate:
    """Probabilité de succès cellulaire sachant h^BC ∈ R_m, le D2D émettant avec le mot n."""
    if not (0 <= m < cb.M and 0 <= n < cb.N):
        raise DomainError(f"Indices ({m}, {n}) hors limites")
    rng = make_rng(mc.seed)
    h_bc = _draw_conditioned(rng, stats.mean_bc, cb.bc_lower()[m], cb.bc_upper()[m], mc.n_samples)
    h_dc = rng.exponential(stats.mean_dc, mc.n_samples)
    h_be = rng.exponential(stats.mean_be, mc.n_samples)
    h_de = rng.exponential(stats.mean_de, mc.n_samples)
    p_bc, r_bc = cb.bc_powers()[m], cb.bc_rates()[m]
    r_e = max(r_bc - cb.bc_secrecy_rates()[m], 0.0)
    p_dd = cb.dd_powers()[n]
    success = ((capacity(h_bc / (1.0 + h_dc * p_dd), p_bc) >= r_bc)
               & (capacity(h_be / (1.0 + h_de * p_dd), p_bc) <= r_e)).astype(float)
    batches = success[:mc.batch_size * mc.n_batches].reshape(mc.n_batches, mc.batch_size).mean(axis=1)
    return McEstimate.from_batches(batches, mc.batch_size)
