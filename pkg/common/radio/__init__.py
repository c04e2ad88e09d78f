"""### Radio Package
Modèle de canal à six liens et dictionnaires de quantification."""

from .channel import (
    LINKS,
    LinkGeometry,
    ChannelStats,
    ChannelSample,
    exp_pdf,
    exp_cdf,
    exp_quantile,
    mean_from_geometry,
    draw_positions,
    scenario_from_geometry,
    make_rng,
    spawn_rngs,
    sample,
)
from .codebook import (
    REGION_ZERO_MODES,
    CellularCodeword,
    D2DCodeword,
    Codebook,
    Constraints,
    Violation,
    first_index,
    region_index,
    region_probability,
    region_probabilities,
    validate,
)

__all__ = [
    # Canal
    'LINKS',
    'LinkGeometry',
    'ChannelStats',
    'ChannelSample',
    'exp_pdf',
    'exp_cdf',
    'exp_quantile',
    'mean_from_geometry',
    'draw_positions',
    'scenario_from_geometry',
    'make_rng',
    'spawn_rngs',
    'sample',

    # Dictionnaires
    'REGION_ZERO_MODES',
    'CellularCodeword',
    'D2DCodeword',
    'Codebook',
    'Constraints',
    'Violation',
    'first_index',
    'region_index',
    'region_probability',
    'region_probabilities',
    'validate',
]
