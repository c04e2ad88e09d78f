"""### Sweep Command
Balayage d'un paramètre : une conception PSO vérifiée par simulation pour chaque (valeur, graine)."""

import argparse
import logging
from pathlib import Path

from tabulate import tabulate

from common.config import default_out_dir, default_workers, load_config
from .experiment import PointResult, run, spec_from_manifest, with_seeds

logger = logging.getLogger('D2DSEC.sweep')

def summary_table(results: list[PointResult]) -> str:
    """Tableau récapitulatif des points."""
    rows = [[r.point.index, r.point.value if r.point.value is not None else '-', r.point.seed,
             r.row.avg_rate_d, r.row.avg_secrecy_rate_c, r.row.outage_codebook,
             r.row.avg_power_c, r.row.avg_power_d, 'oui' if r.row.feasible else 'NON',
             '-' if r.row.rate_gap is None else r.row.rate_gap]
            for r in results]
    headers = ['k', results[0].point.axis or 'valeur', 'graine', 'débit D2D', 'secret C', 'outage',
               'P C', 'P D', 'admissible', 'écart']
    return tabulate(rows, headers=headers, floatfmt='.5g')

def handle(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    if config_path.suffix == '.json':
        spec = spec_from_manifest(config_path)
        logger.info(f"Expérience rejouée depuis le manifeste {config_path}")
    else:
        spec = load_config(config_path)
    if args.seed is not None:
        spec = with_seeds(spec, [args.seed])
    out_dir = Path(args.out_dir) if args.out_dir else default_out_dir('sweep')
    workers = args.workers or default_workers()
    results = run(spec, out_dir, workers=workers, command='sweep')
    print(summary_table(results))
    return 0

def setup(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('sweep', parents=parents,
                                   help="Balayage d'un paramètre (ou conception unique sans axe)")
    parser.add_argument('config', help="Fichier d'expérience YAML, ou manifest.json d'une exécution à rejouer")
    parser.set_defaults(handler=handle)
