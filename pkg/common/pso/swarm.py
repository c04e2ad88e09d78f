"""### PSO > Swarm
Essaim particulaire contraint : initialisation, mise à jour des vitesses/positions et boucle d'optimisation."""

import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional

import numpy as np

from common.errors import DomainError
from common.metrics.report import MetricsReport
from common.radio.channel import ChannelStats, make_rng
from common.radio.codebook import Codebook, Constraints
from .design import MetricBackend, PenaltyWeights, SearchBox, decode, fitness, position_size

logger = logging.getLogger('D2DSEC.pso.swarm')

Evaluator = Callable[[np.ndarray], np.ndarray]

FEASIBILITY_TOL = 1e-6

# CONFIGURATION ---------------------------------------------------

@dataclass(frozen=True)
class PsoConfig:
    """Paramètres de l'essaim."""
    n_pop: int = 50
    max_it: int = 1000
    w: float = 0.729
    c1: float = 1.496
    c2: float = 1.496
    v_frac: float = 0.2
    penalties: PenaltyWeights = field(default_factory=PenaltyWeights)
    seed: int = 0
    workers: int = 1
    log_every: int = 100

    def __post_init__(self):
        if self.n_pop < 2:
            raise DomainError("n_pop doit être >= 2")
        if self.max_it < 1:
            raise DomainError("max_it doit être >= 1")
        if not 0.0 < self.v_frac <= 1.0:
            raise DomainError("v_frac doit être dans (0, 1]")
        if min(self.w, self.c1, self.c2) < 0:
            raise DomainError("w, c1 et c2 doivent être >= 0")
        if self.workers < 1:
            raise DomainError("workers doit être >= 1")

    def to_dict(self) -> dict:
        return {'n_pop': self.n_pop, 'max_it': self.max_it, 'w': self.w, 'c1': self.c1, 'c2': self.c2,
                'v_frac': self.v_frac, 'penalties': self.penalties.to_dict(), 'seed': self.seed}

# ETAT ------------------------------------------------------------

@dataclass(frozen=True)
class Particle:
    """Vue d'une particule : position, vitesse et meilleure position personnelle."""
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_cost: float


@dataclass(frozen=True)
class SwarmState:
    """État de l'essaim (une ligne par particule)."""
    positions: np.ndarray
    velocities: np.ndarray
    costs: np.ndarray
    pbest_positions: np.ndarray
    pbest_costs: np.ndarray
    gbest_position: np.ndarray
    gbest_cost: float
    iteration: int = 0
    trace: tuple[float, ...] = ()

    def __repr__(self) -> str:
        return f'<SwarmState it={self.iteration} particles={len(self.positions)} gbest={self.gbest_cost:.6g}>'

    @property
    def particles(self) -> list[Particle]:
        return [Particle(x, v, p, float(c)) for x, v, p, c in
                zip(self.positions, self.velocities, self.pbest_positions, self.pbest_costs)]

# DYNAMIQUE -------------------------------------------------------

def _reflect(x: np.ndarray, box: SearchBox) -> tuple[np.ndarray, np.ndarray]:
    """Réfléchit les coordonnées sorties de la boîte ; renvoie aussi le masque des coordonnées réfléchies."""
    below = x < box.lower
    above = x > box.upper
    x = np.where(below, 2.0 * box.lower - x, x)
    x = np.where(above, 2.0 * box.upper - x, x)
    return np.clip(x, box.lower, box.upper), below | above

def initialize(box: SearchBox, config: PsoConfig, rng: np.random.Generator, evaluate: Evaluator) -> SwarmState:
    """Positions uniformes dans la boîte, vitesses nulles."""
    positions = box.lower + rng.random((config.n_pop, len(box.lower))) * box.width
    costs = evaluate(positions)
    best = int(np.argmax(costs))
    return SwarmState(positions=positions,
                      velocities=np.zeros_like(positions),
                      costs=costs,
                      pbest_positions=positions.copy(),
                      pbest_costs=costs.copy(),
                      gbest_position=positions[best].copy(),
                      gbest_cost=float(costs[best]),
                      iteration=0,
                      trace=(float(costs[best]),))

def step(state: SwarmState, config: PsoConfig, rng: np.random.Generator, box: SearchBox, evaluate: Evaluator) -> SwarmState:
    """Une itération : vitesses, positions, réflexion dans la boîte, puis meilleurs personnels et global."""
    x, v = state.positions, state.velocities
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    v = (config.w * v
         + config.c1 * r1 * (state.pbest_positions - x)
         + config.c2 * r2 * (state.gbest_position - x))
    v_max = config.v_frac * box.width
    v = np.clip(v, -v_max, v_max)
    x, reflected = _reflect(x + v, box)
    v = np.where(reflected, -v, v)

    costs = evaluate(x)
    improved = costs > state.pbest_costs
    pbest_positions = np.where(improved[:, None], x, state.pbest_positions)
    pbest_costs = np.where(improved, costs, state.pbest_costs)

    gbest_position, gbest_cost = state.gbest_position, state.gbest_cost
    best = int(np.argmax(pbest_costs))
    if pbest_costs[best] > gbest_cost:
        gbest_position, gbest_cost = pbest_positions[best].copy(), float(pbest_costs[best])

    return replace(state, positions=x, velocities=v, costs=costs,
                   pbest_positions=pbest_positions, pbest_costs=pbest_costs,
                   gbest_position=gbest_position, gbest_cost=gbest_cost,
                   iteration=state.iteration + 1, trace=state.trace + (gbest_cost,))

# EVALUATION ------------------------------------------------------

class SwarmEvaluator:
    """Évalue le coût de toutes les particules, en parallèle si `workers` > 1."""

    def __init__(self, cost: Callable[[np.ndarray], float], workers: int = 1):
        self.cost = cost
        self.workers = workers
        self._executor: Optional[Executor] = None
        self._stats = {'evaluations': 0, 'failures': 0}

    def __enter__(self) -> 'SwarmEvaluator':
        if self.workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        if self._executor is not None:
            costs = np.array(list(self._executor.map(self.cost, positions)))
        else:
            costs = np.array([self.cost(p) for p in positions])
        self._stats['evaluations'] += len(costs)
        self._stats['failures'] += int(np.sum(np.isneginf(costs)))
        return costs

    def get_stats(self) -> dict:
        return self._stats.copy()

# OPTIMISATION ----------------------------------------------------

@dataclass(frozen=True)
class OptimizationResult:
    """Meilleur dictionnaire trouvé, ses métriques et la trace du meilleur coût global."""
    codebook: Codebook
    report: MetricsReport
    trace: tuple[float, ...]
    feasible: bool
    slacks: dict[str, float]
    cost: float
    seed: int

    def __iter__(self):
        yield from (self.codebook, self.report, self.trace)

    def to_dict(self) -> dict:
        return {'codebook': self.codebook.to_dict(), 'report': self.report.to_dict(),
                'feasible': self.feasible, 'slacks': self.slacks, 'cost': self.cost, 'seed': self.seed}


def optimize(stats: ChannelStats,
             constraints: Constraints,
             M: int,
             N: int,
             config: PsoConfig = PsoConfig(),
             backend: MetricBackend = MetricBackend()) -> OptimizationResult:
    """Optimise le dictionnaire par essaim particulaire (reproductible à graine fixée).

    Un résultat ne respectant pas les contraintes est signalé (`feasible=False`), pas levé.
    """
    if backend.noise is not None:
        backend.noise.matrix_c(M)
        backend.noise.matrix_d(N)
    if M < 2 and N < 2:
        raise DomainError("Au moins un lien doit avoir deux régions")
    rng = make_rng(config.seed)
    box = SearchBox.from_scenario(stats, constraints, M, N)
    cost = partial(fitness, stats=stats, constraints=constraints, M=M, N=N,
                   backend=backend, penalties=config.penalties)
    logger.info(f"PSO : M={M} N={N} dimension={position_size(M, N)} n_pop={config.n_pop} "
                f"max_it={config.max_it} graine={config.seed}")

    with SwarmEvaluator(cost, config.workers) as evaluate:
        state = initialize(box, config, rng, evaluate)
        for _ in range(config.max_it):
            state = step(state, config, rng, box, evaluate)
            if config.log_every and state.iteration % config.log_every == 0:
                logger.info(f"PSO itération {state.iteration}/{config.max_it} : gbest={state.gbest_cost:.6g}")
        stats_eval = evaluate.get_stats()

    if stats_eval['failures']:
        logger.warning(f"{stats_eval['failures']}/{stats_eval['evaluations']} évaluations en échec (coût -inf)")
    codebook = decode(state.gbest_position, M, N)
    report = backend(codebook, stats)
    slacks = constraints.slacks(report)
    feasible = math.isfinite(state.gbest_cost) and all(s >= -FEASIBILITY_TOL for s in slacks.values())
    if not feasible:
        logger.warning(f"Aucun point admissible trouvé (marges : {slacks})")
    return OptimizationResult(codebook, report, state.trace, feasible, slacks, state.gbest_cost, config.seed)
