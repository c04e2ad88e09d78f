"""### Metrics > Error-free
Évaluation analytique (par quadrature) des métriques avec retour d'information sans erreur.

Les fonctions `*_cells` calculent, pour des lots de triplets (indice décodé, région vraie, ...),
les probabilités jointes élémentaires ; elles sont partagées avec le modèle de retour bruité."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from common.errors import CodebookError, DomainError
from common.radio.channel import ChannelStats
from common.radio.codebook import Codebook, first_index, region_probabilities
from .quadrature import DEFAULT_EPSABS, DEFAULT_EPSREL, integrate_cells, truncate_upper
from .report import SECRECY_EVENTS, MetricsReport

logger = logging.getLogger('D2DSEC.metrics.errorfree')

# Tolérance sur r^e négatif dû aux arrondis
EQUIVOCATION_TOL = 1e-12

# CAPACITES -------------------------------------------------------

def _out(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value

def capacity(h, p):
    """Capacité log2(1 + h·p) en bits/s/Hz."""
    return _out(np.log2(1.0 + np.asarray(h, dtype=float) * np.asarray(p, dtype=float)))

def secrecy_capacity(h_main, h_eve, p):
    """Capacité secrète max(0, log2(1 + h_main·p) - log2(1 + h_eve·p))."""
    return _out(np.maximum(0.0, np.asarray(capacity(h_main, p)) - np.asarray(capacity(h_eve, p))))

def effective_gain(h, h_interferer, p_interferer):
    """Gain effectif h / (1 + h_int·p_int) en présence d'un brouilleur."""
    return _out(np.asarray(h, dtype=float) / (1.0 + np.asarray(h_interferer, dtype=float) * np.asarray(p_interferer, dtype=float)))

# INTEGRALES ELEMENTAIRES -----------------------------------------

def _mass(mean: float, a, b) -> np.ndarray:
    """Masse exponentielle de [a, b) (0 si b <= a)."""
    a = np.asarray(a, dtype=float)
    b = np.maximum(np.asarray(b, dtype=float), a)
    return np.exp(-a / mean) - np.exp(-b / mean)

def _tail_integral(mean: float, interferer_mean: float, power, a, b, x, *,
                   epsabs: float, epsrel: float) -> np.ndarray:
    """∫_a^b f(h)·exp(-(h/x - 1)/(p·h̄_int)) dh, nul pour p = 0 (cellules vectorisées)."""
    power, a, b, x = (np.array(v, dtype=float) for v in np.broadcast_arrays(power, a, b, x))
    b = truncate_upper(b, mean)
    a = np.minimum(a, b)
    active = (power > 0) & (x > 0) & (b > a)
    lo = np.where(active, a, 0.0)
    hi = np.where(active, b, 0.0)
    xs = np.where(active, x, 1.0)
    ps = np.where(active, power, 1.0)

    def integrand(h: np.ndarray) -> np.ndarray:
        return np.exp(-h / mean - (h / xs - 1.0) / (ps * interferer_mean)) / mean

    return integrate_cells(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel)

def _below_mass(mean: float, interferer_mean: float, power, lo, hi, x, *,
                epsabs: float, epsrel: float) -> np.ndarray:
    """Pr(h ∈ [lo, hi), h/(1 + h_int·p) <= x), masse jointe (non conditionnelle)."""
    power, lo, hi, x = (np.array(v, dtype=float) for v in np.broadcast_arrays(power, lo, hi, x))
    direct = _mass(mean, lo, np.maximum(np.minimum(hi, x), lo))
    start = np.maximum(lo, x)
    tail = _tail_integral(mean, interferer_mean, power, start, hi, x, epsabs=epsabs, epsrel=epsrel)
    return direct + tail

# CDF DES GAINS EFFECTIFS -----------------------------------------

@dataclass(frozen=True)
class EffectiveGainSpec:
    """Loi d'un gain effectif h/(1 + h_int·p_int), conditionnée à h ∈ [lo, hi)."""
    direct_mean: float
    interferer_mean: float
    interferer_power: float
    lo: float = 0.0
    hi: float = math.inf

    def __post_init__(self):
        if not (self.direct_mean > 0 and self.interferer_mean > 0):
            raise DomainError("Les moyennes doivent être > 0")
        if not self.interferer_power >= 0:
            raise DomainError(f"Puissance de brouillage négative : {self.interferer_power}")
        if self.lo < 0 or not self.lo < self.hi:
            raise DomainError(f"Région de conditionnement invalide [{self.lo}, {self.hi})")

    @property
    def region_mass(self) -> float:
        return float(_mass(self.direct_mean, self.lo, self.hi))


def cdf_eff_bc(spec: EffectiveGainSpec, x, *, epsabs: float = DEFAULT_EPSABS, epsrel: float = DEFAULT_EPSREL):
    """CDF conditionnelle Pr(ĥ <= x | h ∈ [lo, hi)) du gain effectif cellulaire.

    Pour p_int = 0 la loi se réduit à une exponentielle tronquée (forme fermée) ;
    sinon l'intégrale intérieure sur le brouilleur est fermée et l'extérieure adaptative.

    Args:
        spec: Loi du gain effectif
        x: Seuil(s) >= 0

    Raises:
        DomainError: Seuil négatif ou région de masse nulle
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("Seuil de CDF négatif ou NaN")
    g = spec.region_mass
    if not g > 0:
        raise DomainError(f"Région [{spec.lo}, {spec.hi}) de probabilité nulle")
    mass = _below_mass(spec.direct_mean, spec.interferer_mean, spec.interferer_power,
                       spec.lo, spec.hi, np.atleast_1d(x), epsabs=epsabs, epsrel=epsrel)
    cdf = np.clip(mass / g, 0.0, 1.0)
    return float(cdf[0]) if x.ndim == 0 else cdf.reshape(x.shape)

def cdf_eff_be(mean_be: float, mean_de: float, p_dd, x):
    """CDF fermée du gain effectif de l'espion : 1 - h̄_be/(h̄_be + h̄_de·p·x)·exp(-x/h̄_be)."""
    p_dd = np.asarray(p_dd, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid='ignore', over='ignore'):
        value = 1.0 - mean_be / (mean_be + mean_de * p_dd * x) * np.exp(-x / mean_be)
    value = np.where(np.isinf(x), 1.0, value)
    return _out(np.clip(value, 0.0, 1.0))

def _equivocation_threshold(equivocation: np.ndarray, power: np.ndarray) -> np.ndarray:
    """Seuil (2^r^e - 1)/p sur le gain de l'espion (∞ si p = 0)."""
    if np.any(equivocation < -EQUIVOCATION_TOL):
        raise CodebookError("Débit d'équivoque négatif : r_S dépasse r^BC")
    equivocation = np.maximum(equivocation, 0.0)
    safe = np.where(power > 0, power, 1.0)
    return np.where(power > 0, np.expm1(equivocation * math.log(2.0)) / safe, np.inf)

# CELLULES --------------------------------------------------------

def success_cells(cb: Codebook, stats: ChannelStats, m_dec, m_true, n_dec, *,
                  epsabs: float = DEFAULT_EPSABS, epsrel: float = DEFAULT_EPSREL) -> np.ndarray:
    """Probabilité de succès cellulaire conditionnelle à h^BC ∈ R_{m_true}.

    Le mot de code (p, r, r^e) est celui de la région décodée `m_dec`, le D2D émet avec
    le mot `n_dec`. Succès = fiabilité (ĥ^BC >= h̃(m_dec)) et secret (Ĉ^BE <= r^e).
    """
    m_dec, m_true, n_dec = (np.asarray(v, dtype=int) for v in np.broadcast_arrays(m_dec, m_true, n_dec))
    lower, upper = cb.bc_lower(), cb.bc_upper()
    p_bc = cb.bc_powers()[m_dec]
    p_dd = cb.dd_powers()[n_dec]
    x = lower[m_dec]
    g = region_probabilities(cb.bc_boundaries, stats.mean_bc)[m_true]
    below = _below_mass(stats.mean_bc, stats.mean_dc, p_dd, lower[m_true], upper[m_true], x,
                        epsabs=epsabs, epsrel=epsrel)
    with np.errstate(invalid='ignore', divide='ignore'):
        reliable = np.where(g > 0, 1.0 - below / np.where(g > 0, g, 1.0), 0.0)
    reliable = np.where(p_bc > 0, np.clip(reliable, 0.0, 1.0), 1.0)
    threshold = _equivocation_threshold(cb.bc_equivocations()[m_dec], p_bc)
    secure = np.asarray(cdf_eff_be(stats.mean_be, stats.mean_de, p_dd, threshold))
    return reliable * secure

def secrecy_cells(cb: Codebook, stats: ChannelStats, m_dec, m_true, *,
                  secrecy_event: str = 'capacity',
                  epsabs: float = DEFAULT_EPSABS, epsrel: float = DEFAULT_EPSREL) -> np.ndarray:
    """Pr(h^BC ∈ R_{m_true}, lien fiable avec le mot m_dec, événement de secret) (joint).

    `capacity` : r_S <= C_S, soit h^BE <= ((1 + h·p)·2^-r_S - 1)/p, intégré sur h^BC.
    `equivocation` : C^BE <= r^e, loi marginale de h^BE au seuil (2^r^e - 1)/p.
    """
    if secrecy_event not in SECRECY_EVENTS:
        raise DomainError(f"Événement de secret inconnu : {secrecy_event!r}")
    m_dec, m_true = (np.asarray(v, dtype=int) for v in np.broadcast_arrays(m_dec, m_true))
    lower, upper = cb.bc_lower(), cb.bc_upper()
    p = cb.bc_powers()[m_dec]
    rs = cb.bc_secrecy_rates()[m_dec]
    start = np.maximum(lower[m_true], lower[m_dec])
    stop = np.maximum(upper[m_true], start)
    reliable_mass = _mass(stats.mean_bc, start, stop)
    if secrecy_event == 'equivocation':
        threshold = _equivocation_threshold(cb.bc_equivocations()[m_dec], p)
        secure = np.where(np.isinf(threshold), 1.0, -np.expm1(-threshold / stats.mean_be))
        return reliable_mass * secure

    # Masse fiable moins la part où l'espion dépasse le seuil
    b = truncate_upper(stop, stats.mean_bc)
    a = np.minimum(start, b)
    active = (p > 0) & (b > a)
    lo = np.where(active, a, 0.0)
    hi = np.where(active, b, 0.0)
    ps = np.where(active, p, 1.0)
    shrink = np.exp2(-rs)
    mean_bc, mean_be = stats.mean_bc, stats.mean_be

    def integrand(h: np.ndarray) -> np.ndarray:
        y = np.maximum(0.0, ((1.0 + h * ps) * shrink - 1.0) / ps)
        return np.exp(-h / mean_bc - y / mean_be) / mean_bc

    leak = integrate_cells(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel)
    return np.where(p > 0, np.clip(reliable_mass - leak, 0.0, None), reliable_mass)

def d2d_cells(cb: Codebook, stats: ChannelStats, m_dec, n_dec, n_true, *,
              epsabs: float = DEFAULT_EPSABS, epsrel: float = DEFAULT_EPSREL) -> np.ndarray:
    """Pr(h^DD ∈ R_{n_true}, ĥ^DD >= h̃(n_dec)) avec brouillage de la BS au mot m_dec (joint)."""
    m_dec, n_dec, n_true = (np.asarray(v, dtype=int) for v in np.broadcast_arrays(m_dec, n_dec, n_true))
    lower, upper = cb.dd_lower(), cb.dd_upper()
    p_bc = cb.bc_powers()[m_dec]
    x = lower[n_dec]
    start = np.maximum(lower[n_true], x)
    stop = np.maximum(upper[n_true], start)
    mass = _mass(stats.mean_dd, start, stop)
    tail = _tail_integral(stats.mean_dd, stats.mean_bd, p_bc, start, stop, x, epsabs=epsabs, epsrel=epsrel)
    return np.clip(mass - tail, 0.0, None)

# PROBABILITES DE SUCCES ------------------------------------------

def _check_index(name: str, value: int, size: int) -> None:
    if not 0 <= value < size:
        raise DomainError(f"Indice {name}={value} hors de [0, {size - 1}]")

def success_prob_cell(cb: Codebook, stats: ChannelStats, m: int, n: int, **tol) -> float:
    """Probabilité de succès cellulaire sachant h^BC ∈ R_m et le mot D2D n.

    Raises:
        DomainError: Indice hors limites
        CodebookError: r^e(m) < 0
    """
    _check_index('m', m, cb.M)
    _check_index('n', n, cb.N)
    return float(success_cells(cb, stats, m, m, n, **tol))

def success_mass_cell(cb: Codebook, stats: ChannelStats, m: int, n: int, **tol) -> float:
    """Forme jointe G^BC_m · G^DD_n · succès(m, n)."""
    g_bc = region_probabilities(cb.bc_boundaries, stats.mean_bc)[m]
    g_dd = region_probabilities(cb.dd_boundaries, stats.mean_dd)[n]
    return float(g_bc * g_dd * success_prob_cell(cb, stats, m, n, **tol))

# METRIQUES -------------------------------------------------------

def outage_given_region(cb: Codebook, stats: ChannelStats, *, region_zero: str = 'silent', **tol) -> np.ndarray:
    """Outage par région cellulaire codée : Σ_n G^DD_n·(1 - succès(m, n)). Indice 0 : 0."""
    start = first_index(region_zero)
    out = np.zeros(cb.M)
    if cb.M < 2:
        return out
    ms, ns = np.meshgrid(np.arange(1, cb.M), np.arange(start, cb.N), indexing='ij')
    s = success_cells(cb, stats, ms.ravel(), ms.ravel(), ns.ravel(), **tol).reshape(ms.shape)
    g_dd = region_probabilities(cb.dd_boundaries, stats.mean_dd)[start:]
    out[1:] = (1.0 - s) @ g_dd
    return out

def outage_codebook(cb: Codebook, stats: ChannelStats, *, region_zero: str = 'silent', **tol) -> float:
    """Outage du dictionnaire cellulaire : Σ_m G^BC_m · Σ_n G^DD_n · (1 - succès(m, n))."""
    g_bc = region_probabilities(cb.bc_boundaries, stats.mean_bc)
    per_region = outage_given_region(cb, stats, region_zero=region_zero, **tol)
    return float(np.clip(g_bc[1:] @ per_region[1:], 0.0, 1.0))

def avg_power_c(cb: Codebook, stats: ChannelStats) -> float:
    """Puissance moyenne de la BS : Σ_m G^BC_m·p^BC(m)."""
    return float(region_probabilities(cb.bc_boundaries, stats.mean_bc) @ cb.bc_powers())

def avg_power_d(cb: Codebook, stats: ChannelStats) -> float:
    """Puissance moyenne du TD2D : Σ_n G^DD_n·p^DD(n)."""
    return float(region_probabilities(cb.dd_boundaries, stats.mean_dd) @ cb.dd_powers())

def _secrecy_by_region(cb, stats, secrecy_event, **tol) -> np.ndarray:
    out = np.zeros(cb.M)
    if cb.M < 2:
        return out
    ms = np.arange(1, cb.M)
    out[1:] = secrecy_cells(cb, stats, ms, ms, secrecy_event=secrecy_event, **tol) * cb.bc_secrecy_rates()[1:]
    return out

def avg_secrecy_rate_c(cb: Codebook, stats: ChannelStats, *, secrecy_event: str = 'capacity', **tol) -> float:
    """Débit secret moyen : Σ_m Pr(h^BC ∈ R_m, r_S(m) <= C_S)·r_S(m)."""
    return float(_secrecy_by_region(cb, stats, secrecy_event, **tol).sum())

def _rate_d_by_region(cb, stats, region_zero, **tol) -> np.ndarray:
    start = first_index(region_zero)
    out = np.zeros(cb.N)
    if cb.N < 2 or start >= cb.M:
        return out
    ms, ns = np.meshgrid(np.arange(start, cb.M), np.arange(1, cb.N), indexing='ij')
    cells = d2d_cells(cb, stats, ms.ravel(), ns.ravel(), ns.ravel(), **tol).reshape(ms.shape)
    g_bc = region_probabilities(cb.bc_boundaries, stats.mean_bc)[start:]
    out[1:] = (g_bc @ cells) * cb.dd_rates()[1:]
    return out

def avg_rate_d(cb: Codebook, stats: ChannelStats, *, region_zero: str = 'silent', **tol) -> float:
    """Débit moyen D2D : Σ_m G^BC_m Σ_n Pr(h^DD ∈ R_n, r^DD(n) <= Ĉ^D)·r^DD(n)."""
    return float(_rate_d_by_region(cb, stats, region_zero, **tol).sum())

def evaluate_metrics(cb: Codebook, stats: ChannelStats, *,
                     region_zero: str = 'silent',
                     secrecy_event: str = 'capacity',
                     epsabs: float = DEFAULT_EPSABS,
                     epsrel: float = DEFAULT_EPSREL) -> MetricsReport:
    """Évalue toutes les métriques sans erreur de retour et leurs détails par région."""
    tol = {'epsabs': epsabs, 'epsrel': epsrel}
    g_bc = region_probabilities(cb.bc_boundaries, stats.mean_bc)
    g_dd = region_probabilities(cb.dd_boundaries, stats.mean_dd)
    outage = outage_given_region(cb, stats, region_zero=region_zero, **tol)
    secrecy = _secrecy_by_region(cb, stats, secrecy_event, **tol)
    rate_d = _rate_d_by_region(cb, stats, region_zero, **tol)
    power_c = g_bc * cb.bc_powers()
    power_d = g_dd * cb.dd_powers()
    return MetricsReport(
        avg_power_c=float(power_c.sum()),
        avg_power_d=float(power_d.sum()),
        avg_secrecy_rate_c=float(secrecy.sum()),
        avg_rate_d=float(rate_d.sum()),
        outage_codebook=float(np.clip(g_bc[1:] @ outage[1:], 0.0, 1.0)),
        mode='error-free',
        region_zero=region_zero,
        secrecy_event=secrecy_event,
        breakdowns={
            'power_c': tuple(power_c.tolist()),
            'power_d': tuple(power_d.tolist()),
            'secrecy_rate_c': tuple(secrecy.tolist()),
            'outage_c': tuple(outage.tolist()),
            'rate_d': tuple(rate_d.tolist()),
        },
    )
