"""### Common > DataIO
Gestion des dossiers de résultats et des fichiers produits (CSV, JSON, manifestes)."""

import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from common.cdi.estimators import SampleSet
from common.errors import CodebookError
from common.radio.codebook import Codebook, validate

__RUNDATA_INSTANCES : dict[str, 'RunData'] = {}

logger = logging.getLogger('D2DSEC.dataio')

# FORMATAGE ====================================================

def format_cell(value: Any) -> str:
    """Représentation CSV d'une valeur (flottants en `repr`, exacte et stable)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    if value is None:
        return ''
    return str(value)

def canonical_json(data: Any) -> str:
    """JSON trié et compact, base du hachage de contenu."""
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False)

def content_hash(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()

# DONNEES D'EXECUTION ==========================================

class RunData:
    def __init__(self, out_dir: str | Path):
        """Classe de gestion des fichiers d'une exécution.

        :param out_dir: Dossier de sortie (créé si besoin)
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._written : list[Path] = []

    def __repr__(self) -> str:
        return f'<RunData out_dir={str(self.out_dir)!r}>'

    # --- Dossiers ---

    def get_subfolder(self, name: str, *, create: bool = False) -> Path:
        """Renvoie le chemin du sous-dossier `name`.

        :param name: Nom du dossier
        :param create: Si `True`, crée le dossier s'il n'existe pas
        :return: Chemin du dossier
        """
        folder = self.out_dir / name
        if create:
            folder.mkdir(parents=True, exist_ok=True)
        return folder

    @property
    def written(self) -> list[Path]:
        """Fichiers écrits depuis la création de l'instance."""
        return list(self._written)

    def _register(self, path: Path) -> Path:
        self._written.append(path)
        logger.info(f"Écrit : {path}")
        return path

    # --- CSV ---

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Écrit un fichier CSV à colonnes fixes.

        :param name: Nom du fichier
        :param columns: En-tête
        :param rows: Lignes (même longueur que l'en-tête)
        :return: Chemin du fichier
        """
        path = self.out_dir / name
        with path.open('w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                if len(row) != len(columns):
                    raise ValueError(f"Ligne de {len(row)} valeurs pour {len(columns)} colonnes dans {name}")
                writer.writerow([format_cell(v) for v in row])
        return self._register(path)

    def write_trace(self, index: int, trace: Sequence[float]) -> Path:
        """Écrit la trace `iter,gbest_cost` du point `index`."""
        return self.write_csv(f'trace_{index}.csv', ('iter', 'gbest_cost'),
                              ((i, float(c)) for i, c in enumerate(trace)))

    # --- JSON ---

    def write_json(self, name: str, data: Any) -> Path:
        path = self.out_dir / name
        path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + '\n', encoding='utf-8')
        return self._register(path)

    def write_codebook(self, index: int, codebook: Codebook) -> Path:
        path = self.out_dir / f'codebook_{index}.json'
        codebook.save(path)
        return self._register(path)

    def write_manifest(self, config: dict, *, command: str, extra: dict | None = None) -> Path:
        """Écrit `manifest.json` : configuration complète et empreinte SHA-256 des entrées.

        :param config: Configuration effective (sérialisable en JSON)
        :param command: Commande exécutée
        :param extra: Informations complémentaires (non hachées)
        :return: Chemin du manifeste
        """
        manifest = {'command': command, 'config': config, 'content_hash': content_hash({'command': command, 'config': config})}
        if extra:
            manifest.update(extra)
        return self.write_json('manifest.json', manifest)


def get_instance(out_dir: str | Path) -> RunData:
    """Renvoie l'instance de gestion des fichiers du dossier `out_dir`.

    :param out_dir: Dossier de sortie
    :return: Instance de RunData
    """
    key = str(Path(out_dir).resolve())
    if key not in __RUNDATA_INSTANCES:
        __RUNDATA_INSTANCES[key] = RunData(out_dir)
    return __RUNDATA_INSTANCES[key]

def release_instance(out_dir: str | Path) -> list[Path]:
    """Retire du cache l'instance du dossier `out_dir` en fin d'exécution.

    :param out_dir: Dossier de sortie
    :return: Fichiers écrits par l'instance (liste vide si aucune instance)
    """
    run_data = __RUNDATA_INSTANCES.pop(str(Path(out_dir).resolve()), None)
    if run_data is None:
        return []
    written = run_data.written
    run_data._written.clear()
    logger.debug(f"{len(written)} fichier(s) écrits dans {run_data.out_dir}")
    return written


# LECTURE ======================================================

def read_codebook(path: str | Path) -> Codebook:
    """Charge un dictionnaire depuis un fichier JSON et vérifie ses invariants.

    :raises CodebookError: Fichier illisible, mal formé ou dictionnaire invalide
    """
    codebook = Codebook.load(path)
    violations = validate(codebook)
    if violations:
        details = "; ".join(v.message for v in violations)
        raise CodebookError(f"Dictionnaire invalide dans {path} : {details}")
    return codebook

def read_manifest(path: str | Path) -> dict:
    """Charge un manifeste et vérifie son empreinte.

    :raises ValueError: Empreinte incohérente avec le contenu
    """
    manifest = json.loads(Path(path).read_text(encoding='utf-8'))
    expected = content_hash({'command': manifest['command'], 'config': manifest['config']})
    if manifest.get('content_hash') != expected:
        raise ValueError(f"Empreinte du manifeste {path} incohérente")
    return manifest

def load_samples(path: str | Path) -> SampleSet:
    """Charge des échantillons de gain normalisé (fichier texte à une colonne).

    :raises DomainError: Fichier illisible ou valeurs invalides
    """
    samples = SampleSet.load(path)
    logger.info(f"{samples.L} échantillons chargés depuis {path}")
    return samples
