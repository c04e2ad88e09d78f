"""### PSO Package
Conception du dictionnaire par essaim particulaire contraint."""

from .design import (
    MetricBackend,
    PenaltyWeights,
    SearchBox,
    decode,
    encode,
    fitness,
    penalized_cost,
    position_size,
)
from .swarm import (
    OptimizationResult,
    Particle,
    PsoConfig,
    SwarmEvaluator,
    SwarmState,
    initialize,
    optimize,
    step,
)

__all__ = [
    # Conception
    'MetricBackend',
    'PenaltyWeights',
    'SearchBox',
    'decode',
    'encode',
    'fitness',
    'penalized_cost',
    'position_size',

    # Essaim
    'OptimizationResult',
    'Particle',
    'PsoConfig',
    'SwarmEvaluator',
    'SwarmState',
    'initialize',
    'optimize',
    'step',
]
