"""### Common > Config
Chargement et validation des fichiers d'expérience (YAML + pydantic) et réglages d'environnement."""

import logging
import math
import os
from pathlib import Path
from typing import Literal, Optional

import yaml
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from common.cdi.estimators import DEFAULT_KNOTS, DEFAULT_OUTLIER_SCALE
from common.errors import ConfigError
from common.metrics.noisy import FeedbackNoise
from common.montecarlo.oracle import McConfig
from common.pso.design import PenaltyWeights
from common.pso.swarm import PsoConfig
from common.radio.channel import LINKS, ChannelStats, LinkGeometry, make_rng, mean_from_geometry, scenario_from_geometry
from common.radio.codebook import Constraints

logger = logging.getLogger('D2DSEC.config')

# CONSTANTES ------------------------------------------------------

SWEEP_AXES = ('p_d_max', 'outage_max', 'r_s_c_min', 'q', 'bits', 'L', 'kappa', 'delta')

DEFAULT_MEANS = {'mean_bc': 1.0, 'mean_bd': 0.5, 'mean_dd': 1.0, 'mean_dc': 0.5, 'mean_be': 0.5, 'mean_de': 0.5}
DEFAULT_P_C_MAX_DB = 5.0
DEFAULT_P_D_MAX_DB = 10.0

ENV_WORKERS = 'D2DSEC_WORKERS'
ENV_OUT_DIR = 'D2DSEC_OUT_DIR'

def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)

def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)

# SECTIONS --------------------------------------------------------

class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class LinkSection(_Section):
    """Géométrie explicite d'un lien."""
    d: float = Field(gt=0)
    d0: float = Field(1.0, gt=0)
    gamma: float = Field(4.0, ge=0)
    shadow_sigma_db: float = Field(8.0, ge=0)


class GeometrySection(_Section):
    """Génération des moyennes par la géométrie (liens explicites ou placement aléatoire)."""
    links: Optional[dict[Literal['bc', 'bd', 'dd', 'dc', 'be', 'de'], LinkSection]] = None
    cell_radius: float = Field(100.0, gt=0)
    d0: float = Field(1.0, gt=0)
    gamma: float = Field(4.0, ge=0)
    shadow_sigma_db: float = Field(8.0, ge=0)
    reference_gain_db: float = 70.0

    @model_validator(mode='after')
    def _all_links(self):
        if self.links is not None and set(self.links) != set(LINKS):
            missing = sorted(set(LINKS) - set(self.links))
            raise ValueError(f"liens manquants : {', '.join(missing)}")
        return self


class ScenarioSection(_Section):
    mean_bc: Optional[float] = Field(None, gt=0)
    mean_bd: Optional[float] = Field(None, gt=0)
    mean_dd: Optional[float] = Field(None, gt=0)
    mean_dc: Optional[float] = Field(None, gt=0)
    mean_be: Optional[float] = Field(None, gt=0)
    mean_de: Optional[float] = Field(None, gt=0)
    geometry: Optional[GeometrySection] = None
    seed: int = 0

    @model_validator(mode='after')
    def _means_or_geometry(self):
        given = [k for k in DEFAULT_MEANS if getattr(self, k) is not None]
        if given and self.geometry is not None:
            raise ValueError("donner soit les moyennes, soit la géométrie, pas les deux")
        if given and len(given) != len(DEFAULT_MEANS):
            missing = sorted(set(DEFAULT_MEANS) - set(given))
            raise ValueError(f"moyennes manquantes : {', '.join(missing)}")
        return self

    def to_stats(self) -> ChannelStats:
        """CDI du scénario (moyennes directes, géométrie ou valeurs par défaut)."""
        if self.geometry is None:
            if self.mean_bc is None:
                return ChannelStats(**DEFAULT_MEANS)
            return ChannelStats(**{k: getattr(self, k) for k in DEFAULT_MEANS})
        geo = self.geometry
        rng = make_rng(self.seed)
        if geo.links is None:
            return scenario_from_geometry(rng, cell_radius=geo.cell_radius, reference_distance=geo.d0,
                                          pathloss_exponent=geo.gamma, shadowing_db_sigma=geo.shadow_sigma_db,
                                          reference_gain_db=geo.reference_gain_db)
        scale = db_to_linear(geo.reference_gain_db)
        means = {}
        for link in LINKS:
            spec = geo.links[link]
            draw = float(rng.normal(0.0, spec.shadow_sigma_db))
            means[f'mean_{link}'] = scale * mean_from_geometry(
                LinkGeometry(spec.d, spec.d0, spec.gamma, spec.shadow_sigma_db), draw)
        return ChannelStats(**means)


class ConstraintsSection(_Section):
    r_s_c_min: float = Field(0.1, ge=0)
    outage_max: float = Field(0.1, ge=0, le=1)
    p_c_max: Optional[float] = Field(None, ge=0)
    p_c_max_db: Optional[float] = None
    p_d_max: Optional[float] = Field(None, ge=0)
    p_d_max_db: Optional[float] = None

    @model_validator(mode='after')
    def _single_unit(self):
        for name in ('p_c_max', 'p_d_max'):
            if getattr(self, name) is not None and getattr(self, f'{name}_db') is not None:
                raise ValueError(f"{name} et {name}_db sont exclusifs")
        return self

    def to_constraints(self) -> Constraints:
        def power(name: str, default_db: float) -> float:
            if getattr(self, name) is not None:
                return getattr(self, name)
            value_db = getattr(self, f'{name}_db')
            return db_to_linear(default_db if value_db is None else value_db)
        return Constraints(r_s_c_min=self.r_s_c_min, outage_max=self.outage_max,
                           p_c_max=power('p_c_max', DEFAULT_P_C_MAX_DB),
                           p_d_max=power('p_d_max', DEFAULT_P_D_MAX_DB))


class CodebookDimsSection(_Section):
    M: int = Field(8, ge=1)
    N: int = Field(8, ge=1)
    region_zero: Literal['silent', 'dropped'] = 'silent'


class PenaltySection(_Section):
    rate: float = Field(100.0, ge=0)
    outage: float = Field(100.0, ge=0)
    pc: float = Field(100.0, ge=0)
    pd: float = Field(100.0, ge=0)


class PsoSection(_Section):
    n_pop: int = Field(50, ge=2)
    max_it: int = Field(1000, ge=1)
    w: float = Field(0.729, ge=0)
    c1: float = Field(1.496, ge=0)
    c2: float = Field(1.496, ge=0)
    v_frac: float = Field(0.2, gt=0, le=1)
    penalties: PenaltySection = Field(default_factory=PenaltySection)
    seed: int = 0
    log_every: int = Field(100, ge=0)

    def to_config(self, *, seed: Optional[int] = None, workers: int = 1) -> PsoConfig:
        return PsoConfig(n_pop=self.n_pop, max_it=self.max_it, w=self.w, c1=self.c1, c2=self.c2,
                         v_frac=self.v_frac, penalties=PenaltyWeights(**self.penalties.model_dump()),
                         seed=self.seed if seed is None else seed, workers=workers, log_every=self.log_every)


class McSection(_Section):
    n_samples: int = Field(1_000_000, ge=1000)
    n_batches: int = Field(100, ge=1)
    seed: int = 0
    confidence: float = Field(3.0, gt=0)

    def to_config(self, *, seed: Optional[int] = None, workers: int = 1) -> McConfig:
        return McConfig(n_samples=self.n_samples, n_batches=self.n_batches,
                        seed=self.seed if seed is None else seed, confidence=self.confidence, workers=workers)


class NoiseSection(_Section):
    enabled: bool = False
    q_c: float = Field(0.25, ge=0, le=1)
    q_d: float = Field(0.25, ge=0, le=1)

    def to_noise(self) -> Optional[FeedbackNoise]:
        return FeedbackNoise(self.q_c, self.q_d) if self.enabled else None


class IrwlsSection(_Section):
    loss: Literal['hampel', 'identity'] = 'hampel'
    knots: tuple[float, float, float] = DEFAULT_KNOTS
    max_iters: int = Field(100, ge=1)
    tol: float = Field(1e-6, gt=0)


class CdiSection(_Section):
    mode: Literal['perfect', 'parametric', 'kde', 'rkde'] = 'perfect'
    delta: float = Field(0.2, ge=0, lt=1)
    L: int = Field(200, ge=2)
    kappa: int = Field(10, ge=0)
    outlier_scale: float = Field(DEFAULT_OUTLIER_SCALE, gt=0)
    samples_file: Optional[str] = None
    irwls: IrwlsSection = Field(default_factory=IrwlsSection)


class SweepSection(_Section):
    axis: Optional[Literal['p_d_max', 'outage_max', 'r_s_c_min', 'q', 'bits', 'L', 'kappa', 'delta']] = None
    values: list[float] = []
    seeds: list[int] = [0]

    @model_validator(mode='after')
    def _axis_values(self):
        if self.axis is None and self.values:
            raise ValueError("des valeurs sont données sans axe de balayage")
        if self.axis is not None and not self.values:
            raise ValueError(f"l'axe {self.axis} n'a aucune valeur")
        if not self.seeds:
            raise ValueError("au moins une graine est requise")
        return self

# EXPERIENCE ------------------------------------------------------

class ExperimentSpec(_Section):
    """Fichier d'expérience complet."""
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)
    constraints: ConstraintsSection = Field(default_factory=ConstraintsSection)
    codebook_dims: CodebookDimsSection = Field(default_factory=CodebookDimsSection)
    pso: PsoSection = Field(default_factory=PsoSection)
    mc: McSection = Field(default_factory=McSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    cdi: CdiSection = Field(default_factory=CdiSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    secrecy_event: Literal['capacity', 'equivocation'] = 'capacity'

    @property
    def mode(self) -> str:
        return 'noisy' if self.noise.enabled else 'error-free'

    def apply_axis(self, axis: Optional[str], value: float) -> 'ExperimentSpec':
        """Copie de l'expérience avec la valeur `value` sur l'axe de balayage `axis`."""
        if axis is None:
            return self
        if axis == 'p_d_max':
            return self.model_copy(update={'constraints': self.constraints.model_copy(update={'p_d_max': None, 'p_d_max_db': value})})
        if axis in ('outage_max', 'r_s_c_min'):
            return self.model_copy(update={'constraints': self.constraints.model_copy(update={axis: value})})
        if axis == 'q':
            return self.model_copy(update={'noise': NoiseSection(enabled=True, q_c=value, q_d=value)})
        if axis == 'bits':
            size = 2 ** int(value)
            return self.model_copy(update={'codebook_dims': self.codebook_dims.model_copy(update={'M': size, 'N': size})})
        if axis in ('L', 'kappa'):
            return self.model_copy(update={'cdi': self.cdi.model_copy(update={axis: int(value)})})
        if axis == 'delta':
            return self.model_copy(update={'cdi': self.cdi.model_copy(update={'delta': value})})
        raise ConfigError(f"Axe de balayage inconnu : {axis!r}")

    def to_dict(self) -> dict:
        return self.model_dump(mode='json')

# CHARGEMENT ------------------------------------------------------

def parse_config(text: str, source: str = '<texte>') -> ExperimentSpec:
    """Analyse et valide le contenu YAML d'un fichier d'expérience.

    Raises:
        ConfigError: YAML illisible ou clés/valeurs invalides
    """
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        where = f'{source}:{mark.line + 1}' if mark is not None else source
        raise ConfigError(f"YAML invalide dans {source}", [(where, str(getattr(e, 'problem', e)))]) from e
    if not isinstance(data, dict):
        raise ConfigError(f"{source} doit contenir un dictionnaire de sections", [(source, type(data).__name__)])
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        diagnostics = [('.'.join(str(p) for p in err['loc']) or '<racine>', err['msg']) for err in e.errors()]
        raise ConfigError(f"Configuration invalide dans {source}", diagnostics) from e

def load_config(path: str | Path) -> ExperimentSpec:
    """Charge un fichier d'expérience YAML."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"Lecture impossible de {path}", [(str(path), str(e))]) from e
    spec = parse_config(text, str(path))
    logger.info(f"Configuration chargée depuis {path} (mode {spec.mode})")
    return spec

def env_settings(env_file: str | Path = '.env') -> dict[str, str]:
    """Réglages de processus : fichier `.env` puis variables d'environnement (prioritaires)."""
    values = {k: v for k, v in dotenv_values(env_file).items() if v is not None}
    values.update({k: v for k, v in os.environ.items() if k.startswith('D2DSEC_')})
    return values

def default_workers(settings: Optional[dict[str, str]] = None) -> int:
    settings = env_settings() if settings is None else settings
    try:
        return max(1, int(settings.get(ENV_WORKERS, 1)))
    except ValueError:
        logger.warning(f"{ENV_WORKERS} invalide : {settings.get(ENV_WORKERS)!r}, 1 processus utilisé")
        return 1

def default_out_dir(command: str, settings: Optional[dict[str, str]] = None) -> Path:
    """Dossier de sortie par défaut : `D2DSEC_OUT_DIR` (ou `runs`) suivi du nom de la commande."""
    settings = env_settings() if settings is None else settings
    return Path(settings.get(ENV_OUT_DIR, 'runs')) / command
