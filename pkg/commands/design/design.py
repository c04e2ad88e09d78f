"""### Design Command
Conception d'un unique dictionnaire (balayage sans axe) et résumé lisible."""

import argparse
import logging
from pathlib import Path

from tabulate import tabulate

from commands.sweep.experiment import run, with_seeds, without_axis
from common.config import default_out_dir, default_workers, load_config
from common.radio import Codebook

logger = logging.getLogger('D2DSEC.design')

def codebook_table(cb: Codebook) -> str:
    """Mots de code des deux liens, région par région (la région 0 est silencieuse)."""
    bc = [['BC', m, lo, hi, p, rs, r] for m, (lo, hi, p, rs, r) in
          enumerate(zip(cb.bc_lower(), cb.bc_upper(), cb.bc_powers(), cb.bc_secrecy_rates(), cb.bc_rates()))]
    dd = [['DD', n, lo, hi, p, '-', r] for n, (lo, hi, p, r) in
          enumerate(zip(cb.dd_lower(), cb.dd_upper(), cb.dd_powers(), cb.dd_rates()))]
    return tabulate(bc + dd, headers=['lien', 'région', 'borne inf', 'borne sup', 'puissance', 'r_S', 'débit'],
                    floatfmt='.5g')

def handle(args: argparse.Namespace) -> int:
    spec = without_axis(load_config(args.config))
    if args.seed is not None:
        spec = with_seeds(spec, [args.seed])
    out_dir = Path(args.out_dir) if args.out_dir else default_out_dir('design')
    results = run(spec, out_dir, workers=args.workers or default_workers(), command='design', progress=False)

    for r in results:
        report = r.result.report
        print(f"\n== Graine {r.point.seed} : {'admissible' if r.row.feasible else 'NON admissible'} ==")
        print(codebook_table(r.result.codebook))
        metrics = [[name, value, r.mc_report.estimates()[name].value, r.mc_report.estimates()[name].standard_error]
                   for name, value in report.metrics().items()]
        print(tabulate(metrics, headers=['métrique', 'analytique', 'Monte Carlo', 'erreur type'], floatfmt='.6g'))
        print(tabulate([[k, v] for k, v in r.result.slacks.items()], headers=['contrainte', 'marge'], floatfmt='.4g'))
    return 0

def setup(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('design', parents=parents, help="Conçoit un dictionnaire pour un scénario")
    parser.add_argument('config', help="Fichier d'expérience YAML")
    parser.set_defaults(handler=handle)
