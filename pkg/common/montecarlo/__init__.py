"""### Montecarlo Package
Oracle de simulation indépendant des formules analytiques."""

from .oracle import (
    McConfig,
    McEstimate,
    McReport,
    GainSampler,
    ExponentialSampler,
    as_sampler,
    protocol_values,
    simulate_metrics,
    simulate_conditional_cdf,
    simulate_success_cell,
)

__all__ = [
    'McConfig',
    'McEstimate',
    'McReport',
    'GainSampler',
    'ExponentialSampler',
    'as_sampler',
    'protocol_values',
    'simulate_metrics',
    'simulate_conditional_cdf',
    'simulate_success_cell',
]
