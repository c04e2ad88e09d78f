"""### Radio > Channel
Modèle statistique des six liens (BS→CU, BS→RD2D, TD2D→RD2D, TD2D→CU, BS→Eve, TD2D→Eve).

Tous les gains sont des gains de puissance normalisés par le bruit, en échelle linéaire,
distribués exponentiellement (évanouissement de Rayleigh par blocs)."""

import logging
import math
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from common.errors import DomainError

logger = logging.getLogger('D2DSEC.radio.channel')

# CONSTANTES ------------------------------------------------------

LINKS = ('bc', 'bd', 'dd', 'dc', 'be', 'de')

# Gain de référence (normalisé bruit) à la distance d0 pour les scénarios géométriques
DEFAULT_REFERENCE_GAIN_DB = 70.0
DEFAULT_CELL_RADIUS = 100.0
DEFAULT_PATHLOSS_EXPONENT = 4.0
DEFAULT_SHADOWING_SIGMA_DB = 8.0

# DISTRIBUTIONS ---------------------------------------------------

def _check_mean(mean) -> None:
    m = np.asarray(mean, dtype=float)
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise DomainError(f"Moyenne de gain invalide : {mean!r} (doit être finie et > 0)")

def exp_pdf(h, mean):
    """Densité exponentielle (1/mean)·exp(-h/mean).

    Args:
        h: Gain (scalaire ou tableau, >= 0)
        mean: Moyenne (> 0)

    Raises:
        DomainError: Si la moyenne n'est pas strictement positive
    """
    _check_mean(mean)
    h = np.asarray(h, dtype=float)
    out = np.exp(-h / mean) / mean
    return float(out) if out.ndim == 0 else out

def exp_cdf(h, mean):
    """Fonction de répartition exponentielle 1 - exp(-h/mean) (0 pour h <= 0)."""
    _check_mean(mean)
    h = np.maximum(np.asarray(h, dtype=float), 0.0)
    out = -np.expm1(-h / mean)
    return float(out) if out.ndim == 0 else out

def exp_quantile(prob: float, mean: float) -> float:
    """Quantile d'ordre `prob` de l'exponentielle de moyenne `mean`."""
    _check_mean(mean)
    if not 0.0 <= prob < 1.0:
        raise DomainError(f"Probabilité de quantile hors de [0, 1) : {prob}")
    return -mean * math.log1p(-prob)

# TYPES -----------------------------------------------------------

@dataclass(frozen=True)
class LinkGeometry:
    """Géométrie d'un lien : distance, distance de référence, exposant d'affaiblissement et écart-type de masquage."""
    distance: float
    reference_distance: float = 1.0
    pathloss_exponent: float = DEFAULT_PATHLOSS_EXPONENT
    shadowing_db_sigma: float = DEFAULT_SHADOWING_SIGMA_DB

    def __post_init__(self):
        if not (self.distance > 0 and math.isfinite(self.distance)):
            raise DomainError(f"Distance invalide : {self.distance}")
        if not (self.reference_distance > 0 and math.isfinite(self.reference_distance)):
            raise DomainError(f"Distance de référence invalide : {self.reference_distance}")
        if self.pathloss_exponent < 0:
            raise DomainError(f"Exposant d'affaiblissement négatif : {self.pathloss_exponent}")
        if self.shadowing_db_sigma < 0:
            raise DomainError(f"Écart-type de masquage négatif : {self.shadowing_db_sigma}")


@dataclass(frozen=True)
class ChannelStats:
    """Information statistique de canal (CDI) : moyennes des six gains exponentiels."""
    mean_bc: float
    mean_bd: float
    mean_dd: float
    mean_dc: float
    mean_be: float
    mean_de: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{f.name} doit être fini et > 0 (reçu {value!r})")

    def __repr__(self) -> str:
        inner = ', '.join(f'{k}={getattr(self, "mean_" + k):.4g}' for k in LINKS)
        return f'<ChannelStats {inner}>'

    def mean(self, link: str) -> float:
        """Renvoie la moyenne du lien `link` ('bc', 'bd', ...)."""
        if link not in LINKS:
            raise DomainError(f"Lien inconnu : {link!r}")
        return getattr(self, f'mean_{link}')

    def scaled(self, factor: float) -> 'ChannelStats':
        """Renvoie une copie dont toutes les moyennes sont multipliées par `factor`."""
        return replace(self, **{f'mean_{k}': getattr(self, f'mean_{k}') * factor for k in LINKS})

    def to_dict(self) -> dict:
        return {f'mean_{k}': getattr(self, f'mean_{k}') for k in LINKS}

    @classmethod
    def from_dict(cls, data: dict) -> 'ChannelStats':
        return cls(**{f'mean_{k}': float(data[f'mean_{k}']) for k in LINKS})


@dataclass(frozen=True)
class ChannelSample:
    """Réalisations instantanées des six gains (scalaires ou tableaux de même forme)."""
    h_bc: np.ndarray
    h_bd: np.ndarray
    h_dd: np.ndarray
    h_dc: np.ndarray
    h_be: np.ndarray
    h_de: np.ndarray

    def __post_init__(self):
        for k in LINKS:
            if np.any(np.asarray(getattr(self, f'h_{k}')) < 0):
                raise DomainError(f"Gain h_{k} négatif")

    def __len__(self) -> int:
        return int(np.size(self.h_bc))

# GEOMETRIE -------------------------------------------------------

def mean_from_geometry(geo: LinkGeometry, shadowing_draw_db: float = 0.0) -> float:
    """Gain moyen s·(d/d0)^(-γ) avec s = 10^(masquage/10).

    Args:
        geo: Géométrie du lien
        shadowing_draw_db: Tirage de masquage en dB
    """
    s = 10.0 ** (shadowing_draw_db / 10.0)
    return s * (geo.distance / geo.reference_distance) ** (-geo.pathloss_exponent)

def draw_positions(rng: np.random.Generator, n: int, radius: float = DEFAULT_CELL_RADIUS) -> np.ndarray:
    """Tire `n` positions uniformes dans un disque centré sur la BS. Renvoie un tableau (n, 2)."""
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))

def scenario_from_geometry(rng: np.random.Generator,
                           *,
                           cell_radius: float = DEFAULT_CELL_RADIUS,
                           reference_distance: float = 1.0,
                           pathloss_exponent: float = DEFAULT_PATHLOSS_EXPONENT,
                           shadowing_db_sigma: float = DEFAULT_SHADOWING_SIGMA_DB,
                           reference_gain_db: float = DEFAULT_REFERENCE_GAIN_DB) -> ChannelStats:
    """Génère une CDI à partir d'un placement aléatoire des terminaux.

    La BS est au centre ; CU, TD2D, RD2D et l'espion sont uniformes dans la cellule.
    Chaque lien reçoit un unique tirage de masquage log-normal.

    Args:
        rng: Générateur aléatoire
        cell_radius: Rayon de cellule (m)
        reference_distance: Distance de référence d0 (m), plancher des distances
        pathloss_exponent: Exposant γ
        shadowing_db_sigma: Écart-type du masquage (dB)
        reference_gain_db: Gain normalisé par le bruit à la distance d0 (dB)

    Returns:
        ChannelStats du scénario
    """
    cu, tx, rx, eve = draw_positions(rng, 4, cell_radius)
    bs = np.zeros(2)
    pairs = {'bc': (bs, cu), 'bd': (bs, rx), 'dd': (tx, rx),
             'dc': (tx, cu), 'be': (bs, eve), 'de': (tx, eve)}
    shadowing = rng.normal(0.0, shadowing_db_sigma, size=len(LINKS))
    scale = 10.0 ** (reference_gain_db / 10.0)
    means = {}
    for (link, (a, b)), s_db in zip(pairs.items(), shadowing):
        d = max(float(np.hypot(*(a - b))), reference_distance)
        geo = LinkGeometry(d, reference_distance, pathloss_exponent, shadowing_db_sigma)
        means[f'mean_{link}'] = scale * mean_from_geometry(geo, float(s_db))
    stats = ChannelStats(**means)
    logger.info(f"Scénario géométrique généré : {stats!r}")
    return stats

# ECHANTILLONNAGE -------------------------------------------------

def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Générateur à compteur (Philox) initialisé par une graine explicite."""
    return np.random.Generator(np.random.Philox(seed))

def spawn_rngs(seed: int | np.random.SeedSequence, n: int) -> list[np.random.Generator]:
    """Dérive `n` flux indépendants depuis une graine maîtresse."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [make_rng(child) for child in ss.spawn(n)]

def sample(stats: ChannelStats, rng: np.random.Generator, size: Optional[int] = None) -> ChannelSample:
    """Tire six gains exponentiels indépendants de moyennes `stats`.

    Args:
        stats: CDI
        rng: Flux aléatoire (propre à l'appelant)
        size: Taille du lot (None pour un tirage scalaire)
    """
    draws = {f'h_{k}': rng.exponential(stats.mean(k), size=size) for k in LINKS}
    return ChannelSample(**draws)
