"""### CDI Package
Estimation de l'information statistique de canal et écart de débit induit."""

from .estimators import (
    ParametricError,
    SampleSet,
    KernelDensity,
    perturb_mean,
    perturb_stats,
    bandwidth_median_nn,
    kde_fit,
    rkde_fit,
)
from .gap import CDI_MODES, DensitySampler, estimate_cdi, rate_gap

__all__ = [
    'ParametricError',
    'SampleSet',
    'KernelDensity',
    'perturb_mean',
    'perturb_stats',
    'bandwidth_median_nn',
    'kde_fit',
    'rkde_fit',
    'CDI_MODES',
    'DensitySampler',
    'estimate_cdi',
    'rate_gap',
]
