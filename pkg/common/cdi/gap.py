"""### CDI > Gap
Écart relatif de débit D2D entre CDI parfaite et CDI estimée."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from common.errors import DomainError
from common.metrics.errorfree import avg_rate_d
from common.montecarlo.oracle import McConfig, simulate_metrics
from common.radio.channel import LINKS, ChannelSample, ChannelStats
from common.radio.codebook import Codebook
from .estimators import KernelDensity, SampleSet, kde_fit, perturb_stats, rkde_fit

logger = logging.getLogger('D2DSEC.cdi.gap')

CDI_MODES: tuple[str, ...] = ('perfect', 'parametric', 'kde', 'rkde')

# ECHANTILLONNEUR -------------------------------------------------

@dataclass(frozen=True)
class DensitySampler:
    """Gains h_k = h̄_k·X avec X tiré de la densité estimée du gain normalisé."""
    stats: ChannelStats
    density: KernelDensity

    def draw(self, rng: np.random.Generator, size: int) -> ChannelSample:
        return ChannelSample(**{f'h_{k}': self.stats.mean(k) * self.density.sample(rng, size) for k in LINKS})

# ECART -----------------------------------------------------------

def rate_gap(cb: Codebook,
             true_stats: ChannelStats,
             estimate: ChannelStats | KernelDensity,
             *,
             mc: McConfig = McConfig(),
             region_zero: str = 'silent') -> float:
    """|r_vrai - r_estimé| / r_vrai pour le débit moyen D2D du dictionnaire `cb`.

    Une CDI exponentielle est évaluée analytiquement ; une densité à noyaux l'est
    par simulation (loi tronquée à [0, ∞)).

    Raises:
        DomainError: Débit vrai nul
    """
    r_true = avg_rate_d(cb, true_stats, region_zero=region_zero)
    if not r_true > 0:
        raise DomainError("Débit D2D vrai nul : écart relatif indéfini")
    if isinstance(estimate, ChannelStats):
        r_est = r_true if estimate == true_stats else avg_rate_d(cb, estimate, region_zero=region_zero)
    elif isinstance(estimate, KernelDensity):
        report = simulate_metrics(cb, DensitySampler(true_stats, estimate), None, mc, region_zero=region_zero)
        r_est = report.avg_rate_d.value
    else:
        raise DomainError(f"Estimation de CDI non prise en charge : {type(estimate).__name__}")
    gap = abs(r_true - r_est) / r_true
    logger.debug(f"Écart de débit : vrai={r_true:.6g} estimé={r_est:.6g} écart={gap:.4g}")
    return gap

def estimate_cdi(mode: str,
                 true_stats: ChannelStats,
                 *,
                 delta: float = 0.0,
                 samples: Optional[SampleSet] = None,
                 **irwls) -> ChannelStats | KernelDensity:
    """Construit l'estimation de CDI correspondant au mode demandé.

    Args:
        mode: 'perfect', 'parametric', 'kde' ou 'rkde'
        true_stats: CDI vraie
        delta: Erreur relative (mode paramétrique)
        samples: Observations (modes kde/rkde)
        **irwls: Options de `rkde_fit` (knots, max_iters, tol)
    """
    if mode == 'perfect':
        return true_stats
    if mode == 'parametric':
        return perturb_stats(true_stats, delta)
    if mode in ('kde', 'rkde'):
        if samples is None:
            raise DomainError(f"Le mode {mode!r} exige des échantillons")
        if mode == 'kde':
            return kde_fit(samples.values)
        return rkde_fit(samples.values, **irwls)
    raise DomainError(f"Mode de CDI inconnu : {mode!r}")
