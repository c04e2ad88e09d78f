"""### MC Command
Estimation Monte Carlo des cinq métriques d'un dictionnaire (fichier `mc.csv`)."""

import argparse
import logging
from pathlib import Path

from tabulate import tabulate

from commands.sweep.experiment import plan_points, run_point, with_seeds, without_axis
from common import dataio
from common.config import default_out_dir, default_workers, load_config
from common.montecarlo import simulate_metrics

logger = logging.getLogger('D2DSEC.mc')

MC_COLUMNS = ('metric', 'value', 'se', 'n')

def handle(args: argparse.Namespace) -> int:
    spec = load_config(args.config)
    workers = args.workers or default_workers()
    out_dir = Path(args.out_dir) if args.out_dir else default_out_dir('mc')
    run_data = dataio.get_instance(out_dir)

    if args.codebook:
        cb = dataio.read_codebook(args.codebook)
    else:
        logger.info("Aucun dictionnaire fourni : conception PSO préalable")
        spec = without_axis(spec) if args.seed is None else with_seeds(without_axis(spec), [args.seed])
        cb = run_point(plan_points(spec)[0], workers).result.codebook
        run_data.write_codebook(0, cb)

    noise = spec.noise.to_noise()
    mc = spec.mc.to_config(seed=args.seed, workers=workers)
    report = simulate_metrics(cb, spec.scenario.to_stats(), noise, mc,
                              region_zero=spec.codebook_dims.region_zero, secrecy_event=spec.secrecy_event)
    run_data.write_csv('mc.csv', MC_COLUMNS, report.rows())
    dataio.release_instance(out_dir)
    print(tabulate(report.rows(), headers=list(MC_COLUMNS), floatfmt='.6g'))
    return 0

def setup(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('mc', parents=parents, help="Simulation Monte Carlo des métriques")
    parser.add_argument('config', help="Fichier d'expérience YAML")
    parser.add_argument('--codebook', help="Dictionnaire JSON (sinon conçu par PSO au préalable)")
    parser.set_defaults(handler=handle)
