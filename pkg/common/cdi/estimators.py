"""### CDI > Estimators
Estimation de la loi des gains : perturbation paramétrique, KDE gaussien et KDE robuste (IRWLS)."""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.stats import norm

from common.errors import DegenerateBandwidthError, DomainError
from common.radio.channel import LINKS, ChannelStats

logger = logging.getLogger('D2DSEC.cdi.estimators')

# CONSTANTES ------------------------------------------------------

RobustLoss = Literal['hampel', 'identity']
DEFAULT_KNOTS = (50.0, 85.0, 95.0)
DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-6
DEFAULT_OUTLIER_SCALE = 10.0

# PARAMETRIQUE ----------------------------------------------------

@dataclass(frozen=True)
class ParametricError:
    """Erreur relative Δ sur les moyennes : h̄ -> (1 - Δ)·h̄."""
    delta: float

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise DomainError(f"delta doit être dans [0, 1) (reçu {self.delta})")

    def apply(self, stats: ChannelStats) -> ChannelStats:
        return perturb_stats(stats, self.delta)


def perturb_mean(mean: float, delta: float) -> float:
    """Moyenne estimée (1 - delta)·mean.

    Raises:
        DomainError: delta hors de [0, 1)
    """
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta doit être dans [0, 1) (reçu {delta})")
    return (1.0 - delta) * mean

def perturb_stats(stats: ChannelStats, delta: float) -> ChannelStats:
    """Applique la même erreur relative aux six moyennes."""
    return replace(stats, **{f'mean_{k}': perturb_mean(stats.mean(k), delta) for k in LINKS})

# ECHANTILLONS ----------------------------------------------------

@dataclass(frozen=True)
class SampleSet:
    """Observations du gain normalisé (moyenne nominale 1) : L nominales et κ aberrantes."""
    nominal: np.ndarray
    outliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    outlier_scale: float = DEFAULT_OUTLIER_SCALE

    def __post_init__(self):
        values = self.values
        if len(self.nominal) < 1:
            raise DomainError("Au moins un échantillon nominal est requis")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("Les échantillons doivent être finis et >= 0")

    def __repr__(self) -> str:
        return f'<SampleSet L={self.L} kappa={self.kappa}>'

    @property
    def L(self) -> int:
        return len(self.nominal)

    @property
    def kappa(self) -> int:
        return len(self.outliers)

    @property
    def values(self) -> np.ndarray:
        return np.concatenate((np.asarray(self.nominal, dtype=float), np.asarray(self.outliers, dtype=float)))

    @classmethod
    def generate(cls, rng: np.random.Generator, L: int, kappa: int = 0, *,
                 mean: float = 1.0, outlier_scale: float = DEFAULT_OUTLIER_SCALE) -> 'SampleSet':
        """Tire L gains exponentiels de moyenne `mean` et κ aberrants uniformes sur [0, scale·mean]."""
        if L < 1 or kappa < 0:
            raise DomainError(f"Tailles invalides L={L}, kappa={kappa}")
        nominal = rng.exponential(mean, L)
        outliers = rng.uniform(0.0, outlier_scale * mean, kappa)
        return cls(nominal, outliers, outlier_scale)

    @classmethod
    def load(cls, path: str | Path) -> 'SampleSet':
        """Charge un fichier texte à une colonne (toutes les valeurs sont nominales)."""
        try:
            values = np.loadtxt(path, ndmin=1, dtype=float)
        except (OSError, ValueError) as e:
            raise DomainError(f"Lecture impossible de {path} : {e}") from e
        return cls(values.ravel())

# DENSITE A NOYAUX ------------------------------------------------

@dataclass(frozen=True)
class KernelDensity:
    """Mélange de noyaux gaussiens pondérés (centres, largeur δ, poids de somme 1)."""
    centers: np.ndarray
    bandwidth: float
    weights: np.ndarray
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise DomainError(f"Largeur de bande non positive : {self.bandwidth}")
        if len(self.centers) != len(self.weights):
            raise DomainError("Centres et poids de tailles différentes")
        if np.any(self.weights < 0) or abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise DomainError("Les poids doivent être >= 0 et de somme 1")

    def __repr__(self) -> str:
        return f'<KernelDensity L={len(self.centers)} bandwidth={self.bandwidth:.4g} converged={self.converged}>'

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        values = norm.pdf(x[..., None], loc=self.centers, scale=self.bandwidth) @ self.weights
        return float(values) if values.ndim == 0 else values

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        values = norm.cdf(x[..., None], loc=self.centers, scale=self.bandwidth) @ self.weights
        return float(values) if values.ndim == 0 else values

    @property
    def mass_nonnegative(self) -> float:
        """Masse du mélange sur [0, ∞)."""
        return 1.0 - float(self.cdf(0.0))

    def truncated_pdf(self, x):
        """Densité tronquée à [0, ∞) et renormalisée."""
        x = np.asarray(x, dtype=float)
        values = np.where(x >= 0, np.asarray(self.pdf(x)) / self.mass_nonnegative, 0.0)
        return float(values) if values.ndim == 0 else values

    def sample(self, rng: np.random.Generator, size: int, *, truncate: bool = True) -> np.ndarray:
        """Tire `size` valeurs du mélange (par rejet des valeurs négatives si `truncate`)."""
        out = np.empty(size)
        filled = 0
        while filled < size:
            need = size - filled
            chunk = int(need / max(self.mass_nonnegative, 1e-3)) + 16 if truncate else need
            comp = rng.choice(len(self.centers), size=chunk, p=self.weights)
            draws = self.centers[comp] + self.bandwidth * rng.standard_normal(chunk)
            if truncate:
                draws = draws[draws >= 0]
            draws = draws[:need]
            out[filled:filled + len(draws)] = draws
            filled += len(draws)
        return out

# AJUSTEMENT ------------------------------------------------------

def bandwidth_median_nn(samples: Sequence[float]) -> float:
    """Médiane des distances de chaque point à son plus proche voisin.

    Raises:
        DegenerateBandwidthError: Échantillons identiques (largeur nulle)
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if len(x) < 2:
        raise DomainError("Au moins deux échantillons sont requis")
    gaps = np.diff(x)
    left = np.concatenate(([np.inf], gaps))
    right = np.concatenate((gaps, [np.inf]))
    bandwidth = float(np.median(np.minimum(left, right)))
    if not bandwidth > 0:
        raise DegenerateBandwidthError("Largeur de bande nulle : échantillons dégénérés")
    return bandwidth

def kde_fit(samples: Sequence[float], bandwidth: Optional[float] = None) -> KernelDensity:
    """KDE gaussien à poids uniformes 1/L."""
    x = np.asarray(samples, dtype=float)
    if bandwidth is None:
        bandwidth = bandwidth_median_nn(x)
    return KernelDensity(x, float(bandwidth), np.full(len(x), 1.0 / len(x)))

def _hampel_phi(e: np.ndarray, a: float, b: float, c: float) -> np.ndarray:
    """ψ(e)/e pour la fonction de Hampel de nœuds a <= b <= c."""
    safe_e = np.where(e > 0, e, 1.0)
    ramp = a * (c - e) / (max(c - b, 1e-300) * safe_e)
    phi = np.where(e < a, 1.0,
          np.where(e < b, a / safe_e,
          np.where(e < c, ramp, 0.0)))
    return np.clip(phi, 0.0, 1.0)

def _kernel_residuals(gram: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Distance, dans l'espace des noyaux, de chaque point au mélange pondéré."""
    sq = np.diag(gram) - 2.0 * gram @ w + w @ gram @ w
    return np.sqrt(np.maximum(sq, 0.0))

def rkde_fit(samples: Sequence[float],
             bandwidth: Optional[float] = None,
             loss: RobustLoss = 'hampel',
             *,
             knots: Sequence[float] = DEFAULT_KNOTS,
             max_iters: int = DEFAULT_MAX_ITERS,
             tol: float = DEFAULT_TOL) -> KernelDensity:
    """KDE robuste : poids obtenus par moindres carrés itérativement repondérés.

    À chaque itération ω_i ∝ ψ(e_i)/e_i, où e_i est la distance du noyau centré en x_i
    au mélange courant. Les nœuds de Hampel sont les percentiles `knots` des distances initiales.

    Args:
        samples: Observations
        bandwidth: Largeur δ (médiane des plus proches voisins si None)
        loss: 'hampel' ou 'identity' (ψ(e) = e, équivalent au KDE)
        knots: Percentiles des nœuds a, b, c
        max_iters: Nombre maximal d'itérations
        tol: Seuil d'arrêt sur la variation maximale des poids
    """
    x = np.asarray(samples, dtype=float)
    if bandwidth is None:
        bandwidth = bandwidth_median_nn(x)
    if not bandwidth > 0:
        raise DomainError(f"Largeur de bande non positive : {bandwidth}")
    L = len(x)
    w = np.full(L, 1.0 / L)
    if loss == 'identity':
        return KernelDensity(x, float(bandwidth), w, True, 0)
    if loss != 'hampel':
        raise DomainError(f"Fonction de perte inconnue : {loss!r}")

    gram = norm.pdf(x[:, None] - x[None, :], scale=bandwidth)
    a, b, c = np.percentile(_kernel_residuals(gram, w), list(knots))
    b, c = max(b, a), max(c, b, a)

    converged = False
    iteration = 0
    for iteration in range(1, max_iters + 1):
        phi = _hampel_phi(_kernel_residuals(gram, w), a, b, c)
        total = phi.sum()
        new_w = phi / total if total > 0 else np.full(L, 1.0 / L)
        change = float(np.max(np.abs(new_w - w)))
        w = new_w
        if change < tol:
            converged = True
            break
    if not converged:
        logger.warning(f"IRWLS non convergé après {max_iters} itérations (L={L})")
    w = w / w.sum()
    return KernelDensity(x, float(bandwidth), w, converged, iteration)
