"""### Metrics Package
Évaluation analytique des métriques (retour sans erreur et bruité)."""

from .quadrature import DEFAULT_EPSABS, DEFAULT_EPSREL, integrate_cells, truncate_upper
from .report import CSV_COLUMNS, METRIC_NAMES, SECRECY_EVENTS, MetricsReport
from .errorfree import (
    EffectiveGainSpec,
    capacity,
    secrecy_capacity,
    effective_gain,
    cdf_eff_bc,
    cdf_eff_be,
    success_prob_cell,
    success_mass_cell,
    outage_given_region,
    outage_codebook,
    avg_power_c,
    avg_power_d,
    avg_secrecy_rate_c,
    avg_rate_d,
    evaluate_metrics,
)
from .noisy import (
    FeedbackNoise,
    hamming,
    transition_matrix,
    avg_power_c_noisy,
    avg_power_d_noisy,
    avg_secrecy_rate_c_noisy,
    avg_rate_d_noisy,
    outage_codebook_noisy,
    evaluate_metrics_noisy,
    evaluate,
)

__all__ = [
    # Quadrature
    'DEFAULT_EPSABS',
    'DEFAULT_EPSREL',
    'integrate_cells',
    'truncate_upper',

    # Rapport
    'CSV_COLUMNS',
    'METRIC_NAMES',
    'SECRECY_EVENTS',
    'MetricsReport',

    # Sans erreur
    'EffectiveGainSpec',
    'capacity',
    'secrecy_capacity',
    'effective_gain',
    'cdf_eff_bc',
    'cdf_eff_be',
    'success_prob_cell',
    'success_mass_cell',
    'outage_given_region',
    'outage_codebook',
    'avg_power_c',
    'avg_power_d',
    'avg_secrecy_rate_c',
    'avg_rate_d',
    'evaluate_metrics',

    # Bruité
    'FeedbackNoise',
    'hamming',
    'transition_matrix',
    'avg_power_c_noisy',
    'avg_power_d_noisy',
    'avg_secrecy_rate_c_noisy',
    'avg_rate_d_noisy',
    'outage_codebook_noisy',
    'evaluate_metrics_noisy',
    'evaluate',
]
