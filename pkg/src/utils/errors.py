"""
Jerarquia de excepciones del kernel.

Todas derivan de `SitawareError` para que el CLI pueda distinguir fallos del
dominio (codigo de salida 1 o 2) de errores de programacion.
"""
from __future__ import annotations
from typing import Optional


class SitawareError(Exception):
    """Raiz de todos los errores del paquete."""


class ConfigurationError(SitawareError):
    """Configuracion invalida. `path` apunta al campo del escenario si se conoce."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SetupError(SitawareError):
    """Uso del kernel antes de inicializar agentes o entorno."""


class ComponentError(SitawareError):
    """Fallo en la fase compute de un componente."""


# --------------------
# Comunicaciones
# --------------------
class ChannelClosedError(SitawareError):
    pass


class PayloadTooLargeError(SitawareError):
    pass


class IncompleteFrameError(SitawareError):
    """La trama esta truncada: hacen falta mas bytes."""

    def __init__(self, needed: int):
        self.needed = needed
        super().__init__(f"incomplete frame: need {needed} more bytes")


class CorruptStreamError(SitawareError):
    pass


# --------------------
# Entorno
# --------------------
class UnknownEntityError(SitawareError):
    pass


# --------------------
# Logica temporal
# --------------------
class FormulaSyntaxError(SitawareError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownAtomError(SitawareError):
    pass


class UnsupportedFormulaError(SitawareError):
    pass


class InsufficientTraceError(SitawareError):
    pass


# --------------------
# Casos de uso
# --------------------
class PathConstructionError(SitawareError):
    pass


class UnsupportedTaskError(SitawareError):
    pass


class UnknownRegionError(SitawareError):
    pass


# --------------------
# Artefactos
# --------------------
class TraceSchemaError(SitawareError):
    def __init__(self, message: str, version: Optional[str] = None):
        self.version = version
        super().__init__(f"{message} (schema {version})" if version else message)


class ConfigHashMismatchError(SitawareError):
    pass


class UnknownReceiverError(SitawareError):
    """Destinatario no registrado en el canal."""
