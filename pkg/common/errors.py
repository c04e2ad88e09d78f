"""### Common > Errors
Hiérarchie des exceptions du projet D2DSEC."""

# EXCEPTIONS ------------------------------------------------------

class D2DSecError(Exception):
    """Erreur de base du projet."""
    pass

class DomainError(D2DSecError, ValueError):
    """Argument hors du domaine de définition (moyenne nulle, gain NaN, région vide...)."""
    pass

class CodebookError(DomainError):
    """Invariant de dictionnaire violé au moment d'une évaluation."""
    pass

class DegenerateBandwidthError(DomainError):
    """Largeur de bande nulle (échantillons tous identiques)."""
    pass

class MetricsError(D2DSecError):
    """Échec d'une intégration numérique."""
    pass

class ConfigError(D2DSecError):
    """Fichier de configuration illisible ou invalide.

    Args:
        message: Message principal
        diagnostics: Liste de couples (emplacement, message)
    """
    def __init__(self, message: str, diagnostics: list[tuple[str, str]] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = '\n'.join(f'  - {loc}: {msg}' for loc, msg in self.diagnostics)
        return f'{base}\n{details}'
