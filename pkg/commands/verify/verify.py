"""### Verify Command
Confronte les métriques analytiques d'un dictionnaire à l'oracle Monte Carlo (règle des k erreurs types)."""

import argparse
import logging
from pathlib import Path

from tabulate import tabulate

from common import dataio
from common.config import ExperimentSpec, default_out_dir, default_workers, load_config
from common.metrics import METRIC_NAMES, evaluate
from common.montecarlo import simulate_metrics
from common.radio import Codebook

logger = logging.getLogger('D2DSEC.verify')

def verify_codebook(cb: Codebook, spec: ExperimentSpec, *, seed: int | None = None, workers: int = 1) -> dict:
    """Évalue `cb` analytiquement et par simulation sur le scénario de `spec`.

    Returns:
        Dictionnaire {'metrics': [...], 'slacks': {...}, 'feasible': bool, 'all_pass': bool}
    """
    stats = spec.scenario.to_stats()
    constraints = spec.constraints.to_constraints()
    noise = spec.noise.to_noise()
    options = {'region_zero': spec.codebook_dims.region_zero, 'secrecy_event': spec.secrecy_event}
    mc = spec.mc.to_config(seed=seed, workers=workers)

    report = evaluate(cb, stats, noise, **options)
    mc_report = simulate_metrics(cb, stats, noise, mc, **options)
    rows = []
    for name in METRIC_NAMES:
        estimate = mc_report.estimates()[name]
        analytic = getattr(report, name)
        rows.append({'metric': name, 'analytic': analytic, 'mc': estimate.value, 'se': estimate.standard_error,
                     'n': estimate.n_samples, 'pass': bool(estimate.within(analytic, mc.confidence))})
    slacks = constraints.slacks(report)
    return {'mode': report.mode, 'region_zero': report.region_zero, 'secrecy_event': report.secrecy_event,
            'confidence': mc.confidence, 'metrics': rows, 'slacks': slacks,
            'feasible': constraints.is_satisfied(report), 'all_pass': all(r['pass'] for r in rows)}

def handle(args: argparse.Namespace) -> int:
    cb = dataio.read_codebook(args.codebook)
    spec = load_config(args.config)
    verdict = verify_codebook(cb, spec, seed=args.seed, workers=args.workers or default_workers())

    print(tabulate([[r['metric'], r['analytic'], r['mc'], r['se'], abs(r['analytic'] - r['mc']),
                     'ok' if r['pass'] else 'ÉCHEC'] for r in verdict['metrics']],
                   headers=['métrique', 'analytique', 'Monte Carlo', 'erreur type', '|écart|',
                            f"{verdict['confidence']:g} ET"],
                   floatfmt='.6g'))
    print(tabulate([[k, v, 'ok' if v >= -1e-6 else 'VIOLÉE'] for k, v in verdict['slacks'].items()],
                   headers=['contrainte', 'marge', 'état'], floatfmt='.4g'))
    if not verdict['feasible']:
        logger.warning("Le dictionnaire ne respecte pas les contraintes")
    if not verdict['all_pass']:
        logger.warning("Écart analytique / Monte Carlo au-delà de la bande de confiance")

    out_dir = Path(args.out_dir) if args.out_dir else default_out_dir('verify')
    dataio.get_instance(out_dir).write_json('verify.json', {'codebook': str(args.codebook), **verdict})
    dataio.release_instance(out_dir)
    return 0

def setup(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('verify', parents=parents,
                                   help="Vérifie un dictionnaire : métriques analytiques contre Monte Carlo")
    parser.add_argument('codebook', help="Dictionnaire JSON")
    parser.add_argument('config', help="Fichier d'expérience YAML (scénario, contraintes, simulation)")
    parser.set_defaults(handler=handle)
