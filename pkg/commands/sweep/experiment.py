"""### Sweep > Experiment
Orchestration d'une expérience : points de balayage, conception PSO, vérification Monte Carlo et artefacts."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm

from common import dataio
from common.cdi import SampleSet, estimate_cdi, rate_gap
from common.config import ExperimentSpec, SweepSection
from common.errors import ConfigError, DomainError
from common.montecarlo import McReport, simulate_metrics
from common.pso import MetricBackend, OptimizationResult, optimize
from common.radio import ChannelStats, make_rng

logger = logging.getLogger('D2DSEC.sweep.experiment')

# CONSTANTES ------------------------------------------------------

RESULTS_COLUMNS = ('axis', 'value', 'seed', 'avg_rate_d', 'avg_secrecy_rate_c', 'outage_codebook',
                   'avg_power_c', 'avg_power_d', 'slack_rate', 'slack_outage', 'slack_pc', 'slack_pd',
                   'feasible', 'mc_rate_d', 'mc_rate_d_se', 'rate_gap')
TIMINGS_COLUMNS = ('point', 'axis', 'value', 'seed', 'wall_time_s')

# POINTS ----------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    """Point k du balayage : valeur de l'axe, graine et expérience dérivée."""
    index: int
    axis: Optional[str]
    value: Optional[float]
    seed: int
    spec: ExperimentSpec

    def __repr__(self) -> str:
        return f'<SweepPoint k={self.index} {self.axis}={self.value} seed={self.seed}>'

    @property
    def mc_seed(self) -> int:
        """Graine Monte Carlo propre au point."""
        return int(np.random.SeedSequence([self.spec.mc.seed, self.index]).generate_state(1)[0])


@dataclass(frozen=True)
class SweepRow:
    """Ligne de `results.csv`."""
    axis: Optional[str]
    value: Optional[float]
    seed: int
    avg_rate_d: float
    avg_secrecy_rate_c: float
    outage_codebook: float
    avg_power_c: float
    avg_power_d: float
    slack_rate: float
    slack_outage: float
    slack_pc: float
    slack_pd: float
    feasible: bool
    mc_rate_d: float
    mc_rate_d_se: float
    rate_gap: Optional[float] = None
    wall_time: float = 0.0

    def csv_row(self) -> list:
        return [getattr(self, c) for c in RESULTS_COLUMNS]


@dataclass(frozen=True)
class PointResult:
    point: SweepPoint
    row: SweepRow
    result: OptimizationResult
    mc_report: McReport


def plan_points(spec: ExperimentSpec) -> list[SweepPoint]:
    """Points dans l'ordre axe puis graine."""
    axis = spec.sweep.axis
    values: Sequence[Optional[float]] = spec.sweep.values if axis is not None else [None]
    points = []
    for value in values:
        derived = spec.apply_axis(axis, value) if axis is not None else spec
        for seed in spec.sweep.seeds:
            points.append(SweepPoint(len(points), axis, value, seed, derived))
    return points

# EXECUTION D'UN POINT --------------------------------------------

def _cdi_gap(point: SweepPoint, result: OptimizationResult, stats: ChannelStats, mc) -> Optional[float]:
    cdi = point.spec.cdi
    if cdi.mode == 'perfect':
        return None
    samples = None
    if cdi.mode in ('kde', 'rkde'):
        if cdi.samples_file:
            samples = dataio.load_samples(cdi.samples_file)
        else:
            samples = SampleSet.generate(make_rng(point.mc_seed), cdi.L, cdi.kappa, outlier_scale=cdi.outlier_scale)
    irwls = {}
    if cdi.mode == 'rkde':
        irwls = {'loss': cdi.irwls.loss, 'knots': cdi.irwls.knots,
                 'max_iters': cdi.irwls.max_iters, 'tol': cdi.irwls.tol}
    estimate = estimate_cdi(cdi.mode, stats, delta=cdi.delta, samples=samples, **irwls)
    try:
        return rate_gap(result.codebook, stats, estimate, mc=mc, region_zero=point.spec.codebook_dims.region_zero)
    except DomainError as e:
        logger.warning(f"Écart de débit indéfini au point {point.index} : {e}")
        return None

def run_point(point: SweepPoint, workers: int = 1) -> PointResult:
    """Conçoit le dictionnaire d'un point puis le vérifie par simulation."""
    start = time.perf_counter()
    spec = point.spec
    stats = spec.scenario.to_stats()
    constraints = spec.constraints.to_constraints()
    noise = spec.noise.to_noise()
    dims = spec.codebook_dims
    backend = MetricBackend(noise=noise, region_zero=dims.region_zero, secrecy_event=spec.secrecy_event)

    result = optimize(stats, constraints, dims.M, dims.N, spec.pso.to_config(seed=point.seed, workers=workers), backend)
    mc = spec.mc.to_config(seed=point.mc_seed, workers=workers)
    mc_report = simulate_metrics(result.codebook, stats, noise, mc,
                                 region_zero=dims.region_zero, secrecy_event=spec.secrecy_event)
    gap = _cdi_gap(point, result, stats, mc)

    report = result.report
    row = SweepRow(axis=point.axis, value=point.value, seed=point.seed,
                   avg_rate_d=report.avg_rate_d, avg_secrecy_rate_c=report.avg_secrecy_rate_c,
                   outage_codebook=report.outage_codebook, avg_power_c=report.avg_power_c,
                   avg_power_d=report.avg_power_d, **result.slacks, feasible=result.feasible,
                   mc_rate_d=mc_report.avg_rate_d.value, mc_rate_d_se=mc_report.avg_rate_d.standard_error,
                   rate_gap=gap, wall_time=time.perf_counter() - start)
    logger.info(f"Point {point.index} ({point.axis}={point.value}, graine {point.seed}) : "
                f"débit D2D={report.avg_rate_d:.5g} admissible={result.feasible}")
    return PointResult(point, row, result, mc_report)

# EXPERIENCE ------------------------------------------------------

def with_seeds(spec: ExperimentSpec, seeds: Optional[Sequence[int]]) -> ExperimentSpec:
    if not seeds:
        return spec
    return spec.model_copy(update={'sweep': spec.sweep.model_copy(update={'seeds': list(seeds)})})

def without_axis(spec: ExperimentSpec) -> ExperimentSpec:
    return spec.model_copy(update={'sweep': SweepSection(seeds=spec.sweep.seeds)})

def spec_from_manifest(path: str | Path) -> ExperimentSpec:
    """Expérience enregistrée dans un manifeste (empreinte vérifiée)."""
    try:
        manifest = dataio.read_manifest(path)
        return ExperimentSpec.model_validate(manifest["config"])
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError(f"Manifeste inutilisable : {path}", [(str(path), f"{type(e).__name__}: {e}")]) from e

def run(spec: ExperimentSpec,
        out_dir: str | Path,
        *,
        workers: int = 1,
        command: str = 'sweep',
        progress: bool = True) -> list[PointResult]:
    """Exécute tous les points et écrit les artefacts dans `out_dir`.

    Les points tournent en parallèle si `workers` > 1 ; les lignes sont écrites dans
    l'ordre des points quel que soit l'ordre d'achèvement.

    Args:
        spec: Expérience validée
        out_dir: Dossier de sortie
        workers: Nombre de processus
        command: Nom de la commande (enregistré dans le manifeste)
        progress: Affiche une barre de progression

    Returns:
        Résultats des points, dans l'ordre
    """
    points = plan_points(spec)
    run_data = dataio.get_instance(out_dir)
    logger.info(f"{command} : {len(points)} point(s), axe={spec.sweep.axis}, mode={spec.mode}, "
                f"CDI={spec.cdi.mode}, {workers} processus")

    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(tqdm(executor.map(run_point, points), total=len(points),
                                desc=command, unit='point', disable=not progress))
    else:
        inner = workers if len(points) == 1 else 1
        results = [run_point(p, inner) for p in tqdm(points, desc=command, unit='point', disable=not progress)]

    run_data.write_csv('results.csv', RESULTS_COLUMNS, (r.row.csv_row() for r in results))
    run_data.write_csv('timings.csv', TIMINGS_COLUMNS,
                       ((r.point.index, r.point.axis, r.point.value, r.point.seed, r.row.wall_time) for r in results))
    for r in results:
        run_data.write_trace(r.point.index, r.result.trace)
        run_data.write_codebook(r.point.index, r.result.codebook)
    run_data.write_manifest(spec.to_dict(), command=command,
                            extra={'points': len(points), 'feasible': sum(r.row.feasible for r in results)})
    dataio.release_instance(out_dir)

    infeasible = [r.point.index for r in results if not r.row.feasible]
    if infeasible:
        logger.warning(f"{len(infeasible)}/{len(results)} point(s) non admissible(s) : {infeasible}")
    return results
