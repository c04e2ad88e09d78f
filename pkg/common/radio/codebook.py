"""### Radio > Codebook
Frontières de quantification et dictionnaires de transmission des deux liens.

Convention d'indices : les régions sont numérotées 0..M-1 (resp. 0..N-1). La région 0,
[0, h̃(1)), est silencieuse (puissance, débit et débit secret nuls) ; seules les régions
1..M-1 portent un mot de code."""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from common.errors import CodebookError, DomainError

logger = logging.getLogger('D2DSEC.radio.codebook')

# CONSTANTES ------------------------------------------------------

RegionZero = Literal['silent', 'dropped']
REGION_ZERO_MODES: tuple[str, ...] = ('silent', 'dropped')

DEFAULT_MAX_RATE_GUARD = 20.0

def first_index(region_zero: str) -> int:
    """Premier indice de région pris en compte dans les sommes selon la convention active."""
    if region_zero not in REGION_ZERO_MODES:
        raise DomainError(f"Convention de région 0 inconnue : {region_zero!r}")
    return 0 if region_zero == 'silent' else 1

# REGIONS ---------------------------------------------------------

def region_index(boundaries: Sequence[float], h):
    """Indice m tel que h ∈ [h̃(m), h̃(m+1)), avec h̃(0)=0 et h̃(M)=∞.

    Args:
        boundaries: Frontières strictement croissantes h̃(1..M-1)
        h: Gain (scalaire ou tableau)

    Raises:
        DomainError: Gain NaN ou négatif
    """
    arr = np.asarray(h, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("Gain NaN : aucune région")
    if np.any(arr < 0):
        raise DomainError("Gain négatif : aucune région")
    idx = np.searchsorted(np.asarray(boundaries, dtype=float), arr, side='right')
    return int(idx) if idx.ndim == 0 else idx

def region_probability(mean: float, lo: float, hi: float) -> float:
    """Probabilité e^(-lo/mean) - e^(-hi/mean) qu'un gain exponentiel tombe dans [lo, hi).

    Raises:
        DomainError: Si lo >= hi, lo < 0 ou mean <= 0
    """
    if not mean > 0:
        raise DomainError(f"Moyenne non positive : {mean}")
    if lo < 0 or not lo < hi:
        raise DomainError(f"Région invalide [{lo}, {hi})")
    upper = 0.0 if math.isinf(hi) else math.exp(-hi / mean)
    return math.exp(-lo / mean) - upper

def region_probabilities(boundaries: Sequence[float], mean: float) -> np.ndarray:
    """Probabilités G_m de toutes les régions 0..M-1 (vectorisé)."""
    if not mean > 0:
        raise DomainError(f"Moyenne non positive : {mean}")
    edges = np.concatenate(([0.0], np.asarray(boundaries, dtype=float), [np.inf]))
    tails = np.exp(-edges / mean)
    return tails[:-1] - tails[1:]

# MOTS DE CODE ----------------------------------------------------

@dataclass(frozen=True)
class CellularCodeword:
    """Mot de code cellulaire : puissance p^BC et débit secret r_S^BC."""
    power: float
    secrecy_rate: float

    def rate(self, boundary: float) -> float:
        """Débit r^BC = log2(1 + h̃·p) à la frontière basse de la région."""
        return math.log2(1.0 + boundary * self.power)

    def equivocation(self, boundary: float) -> float:
        """Débit d'équivoque r^e = r^BC - r_S."""
        return self.rate(boundary) - self.secrecy_rate


@dataclass(frozen=True)
class D2DCodeword:
    """Mot de code D2D : puissance p^DD."""
    power: float

    def rate(self, boundary: float) -> float:
        return math.log2(1.0 + boundary * self.power)

# DICTIONNAIRE ----------------------------------------------------

@dataclass(frozen=True)
class Codebook:
    """Vecteur de conception : frontières et mots de code des deux liens."""
    bc_boundaries: tuple[float, ...]
    dd_boundaries: tuple[float, ...]
    bc_words: tuple[CellularCodeword, ...]
    dd_words: tuple[D2DCodeword, ...]

    def __post_init__(self):
        object.__setattr__(self, 'bc_boundaries', tuple(float(b) for b in self.bc_boundaries))
        object.__setattr__(self, 'dd_boundaries', tuple(float(b) for b in self.dd_boundaries))
        object.__setattr__(self, 'bc_words', tuple(self.bc_words))
        object.__setattr__(self, 'dd_words', tuple(self.dd_words))

    def __repr__(self) -> str:
        return f'<Codebook M={self.M} N={self.N}>'

    @classmethod
    def from_arrays(cls,
                    bc_boundaries: Sequence[float],
                    bc_powers: Sequence[float],
                    bc_secrecy_rates: Sequence[float],
                    dd_boundaries: Sequence[float],
                    dd_powers: Sequence[float]) -> 'Codebook':
        """Construit un dictionnaire à partir de listes parallèles."""
        if not (len(bc_boundaries) == len(bc_powers) == len(bc_secrecy_rates)):
            raise CodebookError("Longueurs incohérentes pour le lien cellulaire")
        if len(dd_boundaries) != len(dd_powers):
            raise CodebookError("Longueurs incohérentes pour le lien D2D")
        return cls(bc_boundaries=tuple(bc_boundaries),
                   dd_boundaries=tuple(dd_boundaries),
                   bc_words=tuple(CellularCodeword(float(p), float(rs)) for p, rs in zip(bc_powers, bc_secrecy_rates)),
                   dd_words=tuple(D2DCodeword(float(p)) for p in dd_powers))

    # --- Dimensions ---

    @property
    def M(self) -> int:
        return len(self.bc_boundaries) + 1

    @property
    def N(self) -> int:
        return len(self.dd_boundaries) + 1

    # --- Tableaux indexés par région (indice 0 silencieux) ---

    def bc_lower(self) -> np.ndarray:
        return np.concatenate(([0.0], self.bc_boundaries))

    def bc_upper(self) -> np.ndarray:
        return np.concatenate((self.bc_boundaries, [np.inf]))

    def dd_lower(self) -> np.ndarray:
        return np.concatenate(([0.0], self.dd_boundaries))

    def dd_upper(self) -> np.ndarray:
        return np.concatenate((self.dd_boundaries, [np.inf]))

    def bc_powers(self) -> np.ndarray:
        return np.array([0.0] + [w.power for w in self.bc_words])

    def bc_secrecy_rates(self) -> np.ndarray:
        return np.array([0.0] + [w.secrecy_rate for w in self.bc_words])

    def bc_rates(self) -> np.ndarray:
        return np.log2(1.0 + self.bc_lower() * self.bc_powers())

    def bc_equivocations(self) -> np.ndarray:
        return self.bc_rates() - self.bc_secrecy_rates()

    def dd_powers(self) -> np.ndarray:
        return np.array([0.0] + [w.power for w in self.dd_words])

    def dd_rates(self) -> np.ndarray:
        return np.log2(1.0 + self.dd_lower() * self.dd_powers())

    # --- Sérialisation ---

    def to_dict(self) -> dict:
        return {
            'bc_boundaries': list(self.bc_boundaries),
            'dd_boundaries': list(self.dd_boundaries),
            'bc_words': [{'p': w.power, 'rs': w.secrecy_rate} for w in self.bc_words],
            'dd_words': [{'p': w.power} for w in self.dd_words],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Codebook':
        """Crée depuis un dictionnaire.

        Raises:
            CodebookError: Structure invalide
        """
        try:
            return cls(bc_boundaries=tuple(float(b) for b in data['bc_boundaries']),
                       dd_boundaries=tuple(float(b) for b in data['dd_boundaries']),
                       bc_words=tuple(CellularCodeword(float(w['p']), float(w['rs'])) for w in data['bc_words']),
                       dd_words=tuple(D2DCodeword(float(w['p'])) for w in data['dd_words']))
        except (KeyError, TypeError, ValueError) as e:
            raise CodebookError(f"Dictionnaire mal formé : {type(e).__name__}: {e}") from e

    def to_json(self) -> str:
        # repr des flottants Python : aller-retour exact
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> 'Codebook':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise CodebookError(f"JSON invalide (ligne {e.lineno}) : {e.msg}") from e
        if not isinstance(data, dict):
            raise CodebookError("Le fichier doit contenir un objet JSON")
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding='utf-8')

    @classmethod
    def load(cls, path: str | Path) -> 'Codebook':
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as e:
            raise CodebookError(f"Lecture impossible de {path} : {e}") from e
        return cls.from_json(text)

# VALIDATION ------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """Violation d'invariant : nom de l'invariant, indice concerné et message."""
    invariant: str
    index: int
    message: str


def _check_boundaries(name: str, boundaries: Sequence[float]) -> list[Violation]:
    out = []
    for i, b in enumerate(boundaries):
        if not math.isfinite(b):
            out.append(Violation(f'{name}_finite', i, f"non-finite boundary at index {i}"))
        elif b <= 0:
            out.append(Violation(f'{name}_positive', i, f"non-positive boundary at index {i}"))
        if i > 0 and not b > boundaries[i - 1]:
            out.append(Violation(f'{name}_increasing', i, f"non-increasing boundary at index {i}"))
    return out

def validate(cb: Codebook, max_rate_guard: float = DEFAULT_MAX_RATE_GUARD) -> list[Violation]:
    """Vérifie tous les invariants du dictionnaire.

    Args:
        cb: Dictionnaire à vérifier
        max_rate_guard: Borne supérieure admise pour les débits secrets (bits/s/Hz)

    Returns:
        Liste des violations (vide si le dictionnaire est valide)
    """
    violations = _check_boundaries('bc_boundaries', cb.bc_boundaries)
    violations += _check_boundaries('dd_boundaries', cb.dd_boundaries)
    if len(cb.bc_words) != len(cb.bc_boundaries):
        violations.append(Violation('bc_word_count', len(cb.bc_words),
                                    f"expected {len(cb.bc_boundaries)} cellular words, got {len(cb.bc_words)}"))
    if len(cb.dd_words) != len(cb.dd_boundaries):
        violations.append(Violation('dd_word_count', len(cb.dd_words),
                                    f"expected {len(cb.dd_boundaries)} D2D words, got {len(cb.dd_words)}"))
    for m, (word, b) in enumerate(zip(cb.bc_words, cb.bc_boundaries), start=1):
        if not (math.isfinite(word.power) and word.power >= 0):
            violations.append(Violation('bc_power', m, f"invalid cellular power at {m}"))
            continue
        if not (math.isfinite(word.secrecy_rate) and word.secrecy_rate >= 0):
            violations.append(Violation('secrecy_rate', m, f"negative secrecy rate at {m}"))
        elif word.secrecy_rate > max_rate_guard:
            violations.append(Violation('rate_guard', m, f"secrecy rate above guard at {m}"))
        if math.isfinite(b) and word.equivocation(b) < -1e-12:
            violations.append(Violation('equivocation', m, f"negative equivocation rate at {m}"))
    for n, word in enumerate(cb.dd_words, start=1):
        if not (math.isfinite(word.power) and word.power >= 0):
            violations.append(Violation('dd_power', n, f"invalid D2D power at {n}"))
    return violations

# CONTRAINTES -----------------------------------------------------

@dataclass(frozen=True)
class Constraints:
    """Contraintes du problème : débit secret minimal, outage max, puissances moyennes max."""
    r_s_c_min: float
    outage_max: float
    p_c_max: float
    p_d_max: float

    def __post_init__(self):
        if not 0.0 <= self.outage_max <= 1.0:
            raise DomainError(f"outage_max hors de [0, 1] : {self.outage_max}")
        for name in ('r_s_c_min', 'p_c_max', 'p_d_max'):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} doit être >= 0")

    def slacks(self, report) -> dict[str, float]:
        """Marges des contraintes (positives si respectées) pour un rapport de métriques."""
        return {
            'slack_rate': report.avg_secrecy_rate_c - self.r_s_c_min,
            'slack_outage': self.outage_max - report.outage_codebook,
            'slack_pc': self.p_c_max - report.avg_power_c,
            'slack_pd': self.p_d_max - report.avg_power_d,
        }

    def is_satisfied(self, report, tol: float = 1e-6) -> bool:
        return all(v >= -tol for v in self.slacks(report).values())

    def to_dict(self) -> dict:
        return {'r_s_c_min': self.r_s_c_min, 'outage_max': self.outage_max,
                'p_c_max': self.p_c_max, 'p_d_max': self.p_d_max}
