"""### PSO > Design
Codage du dictionnaire en vecteur de position, boîte de recherche et fonction de coût pénalisée.

Disposition d'une position : [h̃^BC (M-1), p^BC (M-1), r_S^BC (M-1), h̃^DD (N-1), p^DD (N-1)]."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.errors import CodebookError, D2DSecError
from common.metrics.noisy import FeedbackNoise, evaluate
from common.metrics.quadrature import DEFAULT_EPSABS, DEFAULT_EPSREL
from common.metrics.report import MetricsReport
from common.radio.channel import ChannelStats, exp_quantile
from common.radio.codebook import DEFAULT_MAX_RATE_GUARD, CellularCodeword, Codebook, Constraints

logger = logging.getLogger('D2DSEC.pso.design')

# CONSTANTES ------------------------------------------------------

BOUNDARY_QUANTILE = 0.999
MIN_BOUNDARY_FRACTION = 1e-9
MIN_BOUNDARY = 1e-12

# POSITIONS -------------------------------------------------------

def position_size(M: int, N: int) -> int:
    return 3 * (M - 1) + 2 * (N - 1)

def _blocks(M: int, N: int) -> dict[str, slice]:
    a, b = M - 1, N - 1
    return {
        'bc_boundaries': slice(0, a),
        'bc_powers': slice(a, 2 * a),
        'bc_secrecy': slice(2 * a, 3 * a),
        'dd_boundaries': slice(3 * a, 3 * a + b),
        'dd_powers': slice(3 * a + b, 3 * a + 2 * b),
    }

def encode(cb: Codebook) -> np.ndarray:
    """Aplatit un dictionnaire en vecteur de position."""
    return np.concatenate((
        cb.bc_boundaries,
        [w.power for w in cb.bc_words],
        [w.secrecy_rate for w in cb.bc_words],
        cb.dd_boundaries,
        [w.power for w in cb.dd_words],
    )).astype(float)

def _repair_boundaries(values: np.ndarray, name: str) -> list[float]:
    out = np.sort(values)
    if not np.array_equal(out, values):
        logger.debug(f"Réparation : frontières {name} triées")
    out = [max(float(v), MIN_BOUNDARY) for v in out]
    for i in range(1, len(out)):
        if out[i] <= out[i - 1]:
            out[i] = math.nextafter(out[i - 1], math.inf)
            logger.debug(f"Réparation : frontière {name}[{i}] rendue strictement croissante")
    return out

def decode(position: np.ndarray, M: int, N: int, *, r_guard: Optional[float] = DEFAULT_MAX_RATE_GUARD) -> Codebook:
    """Reconstruit un dictionnaire valide à partir d'une position (avec réparations).

    Raises:
        CodebookError: Dimension de la position incohérente avec (M, N)
    """
    position = np.asarray(position, dtype=float)
    if M < 1 or N < 1 or position.shape != (position_size(M, N),):
        raise CodebookError(f"Position de dimension {position.shape} incompatible avec M={M}, N={N}")
    blocks = {k: position[s] for k, s in _blocks(M, N).items()}
    bc_bounds = _repair_boundaries(blocks['bc_boundaries'], 'BC')
    dd_bounds = _repair_boundaries(blocks['dd_boundaries'], 'DD')
    bc_words = []
    for m, (b, p, rs) in enumerate(zip(bc_bounds, blocks['bc_powers'], blocks['bc_secrecy']), start=1):
        p = max(float(p), 0.0)
        ceiling = CellularCodeword(p, 0.0).rate(b)
        if r_guard is not None:
            ceiling = min(ceiling, r_guard)
        clamped = min(max(float(rs), 0.0), ceiling)
        if clamped != rs:
            logger.debug(f"Réparation : r_S({m}) ramené de {rs:.6g} à {clamped:.6g}")
        bc_words.append(CellularCodeword(p, clamped))
    dd_powers = [max(float(p), 0.0) for p in blocks['dd_powers']]
    return Codebook.from_arrays(bc_bounds, [w.power for w in bc_words], [w.secrecy_rate for w in bc_words],
                                dd_bounds, dd_powers)

# BOITE DE RECHERCHE ----------------------------------------------

@dataclass(frozen=True)
class SearchBox:
    """Bornes inférieure et supérieure de chaque coordonnée."""
    lower: np.ndarray
    upper: np.ndarray

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @classmethod
    def from_scenario(cls, stats: ChannelStats, constraints: Constraints, M: int, N: int,
                      *, r_guard: float = DEFAULT_MAX_RATE_GUARD) -> 'SearchBox':
        """Frontières dans (0, Q_0.999], puissances dans [0, P_max·M], r_S dans [0, r_guard]."""
        q_bc = exp_quantile(BOUNDARY_QUANTILE, stats.mean_bc)
        q_dd = exp_quantile(BOUNDARY_QUANTILE, stats.mean_dd)
        a, b = M - 1, N - 1
        lower = np.concatenate((np.full(a, MIN_BOUNDARY_FRACTION * q_bc), np.zeros(a), np.zeros(a),
                                np.full(b, MIN_BOUNDARY_FRACTION * q_dd), np.zeros(b)))
        upper = np.concatenate((np.full(a, q_bc), np.full(a, constraints.p_c_max * M), np.full(a, r_guard),
                                np.full(b, q_dd), np.full(b, constraints.p_d_max * N)))
        return cls(lower, upper)

# COUT ------------------------------------------------------------

@dataclass(frozen=True)
class PenaltyWeights:
    """Poids des pénalités quadratiques extérieures."""
    rate: float = 100.0
    outage: float = 100.0
    pc: float = 100.0
    pd: float = 100.0

    def to_dict(self) -> dict:
        return {'rate': self.rate, 'outage': self.outage, 'pc': self.pc, 'pd': self.pd}


@dataclass(frozen=True)
class MetricBackend:
    """Évaluateur de métriques utilisé par la fonction de coût (sans erreur ou bruité)."""
    noise: Optional[FeedbackNoise] = None
    region_zero: str = 'silent'
    secrecy_event: str = 'capacity'
    epsabs: float = DEFAULT_EPSABS
    epsrel: float = DEFAULT_EPSREL

    def __call__(self, cb: Codebook, stats: ChannelStats) -> MetricsReport:
        return evaluate(cb, stats, self.noise, region_zero=self.region_zero, secrecy_event=self.secrecy_event,
                        epsabs=self.epsabs, epsrel=self.epsrel)


def penalized_cost(report: MetricsReport, constraints: Constraints, penalties: PenaltyWeights) -> float:
    """Débit D2D moins les pénalités quadratiques des contraintes violées."""
    return (report.avg_rate_d
            - penalties.rate * max(0.0, constraints.r_s_c_min - report.avg_secrecy_rate_c) ** 2
            - penalties.outage * max(0.0, report.outage_codebook - constraints.outage_max) ** 2
            - penalties.pc * max(0.0, report.avg_power_c - constraints.p_c_max) ** 2
            - penalties.pd * max(0.0, report.avg_power_d - constraints.p_d_max) ** 2)

def fitness(position: np.ndarray,
            stats: ChannelStats,
            constraints: Constraints,
            M: int,
            N: int,
            backend: MetricBackend = MetricBackend(),
            penalties: PenaltyWeights = PenaltyWeights()) -> float:
    """Coût d'une position (à maximiser). Un échec d'évaluation donne -∞."""
    try:
        cb = decode(position, M, N)
        report = backend(cb, stats)
    except (D2DSecError, ArithmeticError, ValueError) as e:
        logger.warning(f"Évaluation impossible d'une particule : {type(e).__name__}: {e}")
        return -math.inf
    return penalized_cost(report, constraints, penalties)
