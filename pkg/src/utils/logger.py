"""
Logging del kernel.

Cada modulo obtiene su logger con `get_logger("Tag")`; los mensajes salen con el
prefijo `[Tag]` que usa todo el proyecto. El nivel se decide una sola vez a partir
de `CONF.DEV` (DEBUG activa todo; si no, LOG_LEVEL).
"""
import logging
from typing import Any

from configs.package import CONF

_ROOT = "sitaware"
_configured = False


def _configure() -> None:
    global _configured
    if _configured:
        return
    root = logging.getLogger(_ROOT)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("[%(tag)s] %(message)s"))
    root.addHandler(handler)
    level = logging.DEBUG if CONF.DEV.DEBUG else getattr(logging, CONF.DEV.LOG_LEVEL, logging.WARNING)
    root.setLevel(level)
    root.propagate = True
    _configured = True


def get_logger(tag: str) -> logging.LoggerAdapter:
    """
    Descripción
        FUNCIÓN: Devuelve un logger hijo de `sitaware` que inyecta `tag` en
        cada registro para el formato `[Tag] mensaje`.

    Argumentos
        - tag (str): etiqueta corta del modulo (p. ej. "Coordinator").

    Retorno
        - logging.LoggerAdapter
    """
    _configure()
    return logging.LoggerAdapter(logging.getLogger(f"{_ROOT}.{tag}"), {"tag": tag})


def exception_log(log: logging.LoggerAdapter, entity: Any, err: BaseException) -> None:
    """Registra una excepcion capturada junto a la entidad que la produjo."""
    log.error("Entity: %s. %s: %s", entity, type(err).__name__, err, exc_info=CONF.DEV.DEBUG)
