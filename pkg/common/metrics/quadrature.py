"""### Metrics > Quadrature
Intégration adaptative (Gauss-Kronrod) vectorisée sur des cellules [lo_k, hi_k)."""

import logging
import math
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec

from common.errors import MetricsError

logger = logging.getLogger('D2DSEC.metrics.quadrature')

# CONSTANTES ------------------------------------------------------

DEFAULT_EPSABS = 1e-9
DEFAULT_EPSREL = 1e-7

# Masse de queue négligée lors de la troncature des régions semi-infinies
TAIL_MASS = 1e-12

# INTEGRATION -----------------------------------------------------

def truncate_upper(hi, mean):
    """Tronque une borne supérieure au quantile 1 - TAIL_MASS de l'exponentielle `mean`."""
    return np.minimum(hi, -np.asarray(mean, dtype=float) * math.log(TAIL_MASS))

def integrate_cells(integrand: Callable[[np.ndarray], np.ndarray],
                    lo: np.ndarray,
                    hi: np.ndarray,
                    *,
                    epsabs: float = DEFAULT_EPSABS,
                    epsrel: float = DEFAULT_EPSREL) -> np.ndarray:
    """Calcule ∫_{lo_k}^{hi_k} integrand(h)[k] dh pour toutes les cellules k d'un coup.

    Chaque intervalle est ramené à t ∈ [0, 1] par h = lo + t·(hi - lo), ce qui permet
    un unique appel à `quad_vec`. Les cellules vides (hi <= lo) valent 0.

    Args:
        integrand: Fonction vectorisée h (K,) -> valeurs (K,)
        lo: Bornes inférieures finies (K,)
        hi: Bornes supérieures finies (K,)
        epsabs: Tolérance absolue
        epsrel: Tolérance relative

    Raises:
        MetricsError: Borne non finie ou échec de l'intégration
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.size == 0:
        return np.zeros(0)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise MetricsError("Bornes d'intégration non finies (troncature manquante)")
    width = np.clip(hi - lo, 0.0, None)
    if not np.any(width > 0):
        return np.zeros_like(lo)

    def mapped(t: float) -> np.ndarray:
        return integrand(lo + t * width) * width

    try:
        value, error = quad_vec(mapped, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, norm='max')
    except (ValueError, ArithmeticError) as e:
        raise MetricsError(f"Échec de quad_vec : {e}") from e
    if not np.all(np.isfinite(value)):
        raise MetricsError("Intégrale non finie")
    limit = max(epsabs, epsrel * float(np.max(np.abs(value))))
    if error > 10 * limit:
        logger.warning(f"Erreur de quadrature estimée {error:.3g} au-dessus de la tolérance {limit:.3g}")
    else:
        logger.debug(f"Quadrature sur {lo.size} cellules, erreur estimée {error:.3g}")
    return np.asarray(value, dtype=float)
