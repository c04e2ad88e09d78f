import argparse
import importlib
import logging
import os
import sys
from pathlib import Path

from common.errors import CodebookError, ConfigError

COMMANDS_PATH = Path(__file__).parent / 'commands'
LOG_FORMAT = "[%(asctime)s] %(levelname)s (%(name)s %(module)s) %(message)s"

logger = logging.getLogger('D2DSEC.Main')

def common_options() -> argparse.ArgumentParser:
    """Options partagées par toutes les commandes."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--seed', type=int, default=None, help="Graine unique (remplace la liste de graines)")
    parser.add_argument('--workers', type=int, default=None, help="Nombre de processus (défaut : D2DSEC_WORKERS ou 1)")
    parser.add_argument('--out-dir', default=None, help="Dossier de sortie (défaut : D2DSEC_OUT_DIR/<commande>)")
    parser.add_argument('-v', '--verbose', action='store_true', help="Journalisation détaillée (DEBUG)")
    return parser

def load_commands(subparsers, parents: list[argparse.ArgumentParser]) -> list[str]:
    loaded = []
    for folder in sorted(os.listdir(COMMANDS_PATH)):
        if not (COMMANDS_PATH / folder / f'{folder}.py').exists():
            continue
        try:
            module = importlib.import_module(f"commands.{folder}.{folder}")
            module.setup(subparsers, parents)
            loaded.append(folder)
        except Exception as e:
            logger.error(f"Error loading command {folder}: {type(e).__name__}: {e}")
    return loaded

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='d2dsec',
                                     description="Conception de dictionnaires de retour limité pour un lien D2D "
                                                 "sous contrainte de secret cellulaire")
    subparsers = parser.add_subparsers(dest='command', required=True)
    load_commands(subparsers, [common_options()])
    return parser

def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT, force=True)
    if args.workers is not None and args.workers < 1:
        print("Erreur : --workers doit être >= 1", file=sys.stderr)
        return 2

    try:
        code = args.handler(args)
    except ConfigError as e:
        print(f"Erreur de configuration : {e}", file=sys.stderr)
        return 2
    except CodebookError as e:
        print(f"Dictionnaire invalide : {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"Erreur lors de l'exécution de {args.command} : {type(e).__name__}: {e}", exc_info=True)
        return 1
    logger.info(f"Commande {args.command} terminée")
    return code

if __name__ == "__main__":
    sys.exit(main())
