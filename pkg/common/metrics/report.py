"""### Metrics > Report
Rapport de métriques (puissances, débits, outage) et sa sérialisation CSV/JSON."""

import json
from dataclasses import dataclass, field
from typing import Literal

# CONSTANTES ------------------------------------------------------

SecrecyEvent = Literal['capacity', 'equivocation']
SECRECY_EVENTS: tuple[str, ...] = ('capacity', 'equivocation')

METRIC_NAMES: tuple[str, ...] = ('avg_power_c', 'avg_power_d', 'avg_secrecy_rate_c', 'avg_rate_d', 'outage_codebook')

# Ordre figé des colonnes
CSV_COLUMNS: tuple[str, ...] = ('mode', 'region_zero', 'secrecy_event', 'qc', 'qd') + METRIC_NAMES

# RAPPORT ---------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    """Métriques d'un dictionnaire pour une CDI donnée.

    Les détails par région (`breakdowns`) sont des tuples indexés par région :
    `power_c`, `secrecy_rate_c`, `outage_c` (par m) et `power_d`, `rate_d` (par n).
    """
    avg_power_c: float
    avg_power_d: float
    avg_secrecy_rate_c: float
    avg_rate_d: float
    outage_codebook: float
    mode: str = 'error-free'
    region_zero: str = 'silent'
    secrecy_event: str = 'capacity'
    qc: float = 0.0
    qd: float = 0.0
    breakdowns: dict[str, tuple[float, ...]] = field(default_factory=dict, compare=False)

    def __repr__(self) -> str:
        return (f'<MetricsReport mode={self.mode} rate_d={self.avg_rate_d:.5g} '
                f'secrecy={self.avg_secrecy_rate_c:.5g} outage={self.outage_codebook:.5g} '
                f'pc={self.avg_power_c:.5g} pd={self.avg_power_d:.5g}>')

    def metrics(self) -> dict[str, float]:
        """Les cinq métriques agrégées, dans l'ordre des colonnes."""
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def csv_row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]

    def to_dict(self) -> dict:
        data = {c: getattr(self, c) for c in CSV_COLUMNS}
        data['breakdowns'] = {k: list(v) for k, v in self.breakdowns.items()}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'MetricsReport':
        kwargs = {c: data[c] for c in CSV_COLUMNS if c in data}
        kwargs['breakdowns'] = {k: tuple(v) for k, v in data.get('breakdowns', {}).items()}
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
