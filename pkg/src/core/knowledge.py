"""
Base de conocimiento clave-valor de un agente.

Los valores van etiquetados (scalar, vector, formula, task, blob). Una lectura de
clave ausente devuelve el centinela `MISSING`, distinto de un valor presente pero
vacio (vector de longitud 0, blob b"").
"""
from __future__ import annotations
import copy
import enum
import pickle
from dataclasses import dataclass
from typing import Any, Dict, Iterator, Optional

import numpy as np


class _Missing:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()


class ValueKind(str, enum.Enum):
    SCALAR = "scalar"
    VECTOR = "vector"
    FORMULA = "formula"
    TASK = "task"
    BLOB = "blob"


@dataclass
class KnowledgeEntry:
    kind: ValueKind
    value: Any
    timestamp: Optional[float] = None


def infer_kind(value: Any) -> ValueKind:
    # Import local para no acoplar core con logic al cargar
    from logic.formula import Formula

    if isinstance(value, bool):
        return ValueKind.BLOB
    if isinstance(value, (int, float, np.floating, np.integer)):
        return ValueKind.SCALAR
    if isinstance(value, (np.ndarray, list, tuple)) and all(
        isinstance(v, (int, float, np.floating, np.integer)) for v in np.ravel(np.asarray(value, dtype=object))
    ):
        return ValueKind.VECTOR
    if isinstance(value, Formula):
        return ValueKind.FORMULA
    if getattr(value, "is_task", False):
        return ValueKind.TASK
    return ValueKind.BLOB


class KnowledgeDatabase:
    """
    Descripción
        CLASE: Almacen de informacion de alto nivel (tareas, mapas, metas)
        compartido por los componentes de un agente.

    Métodos y Funciones
        - set(key, value, kind=None, timestamp=None): escribe (infiere el tipo).
        - get(key, default=MISSING): lee el valor o el centinela.
        - entry(key): entrada completa (tipo y timestamp) o MISSING.
        - contains / keys / items / remove / snapshot.
    """

    def __init__(self, entries: Optional[Dict[str, Any]] = None):
        self._entries: Dict[str, KnowledgeEntry] = {}
        for key, value in (entries or {}).items():
            self.set(key, value)

    def set(self, key: str, value: Any, kind: Optional[ValueKind] = None, timestamp: Optional[float] = None) -> None:
        if not isinstance(key, str) or not key:
            raise KeyError(f"knowledge keys must be non-empty strings, got {key!r}")
        kind = ValueKind(kind) if kind is not None else infer_kind(value)
        if kind == ValueKind.SCALAR:
            value = float(value)
        elif kind == ValueKind.VECTOR:
            value = np.atleast_1d(np.asarray(value, dtype=float)).copy()
        self._entries[key] = KnowledgeEntry(kind, value, timestamp)

    def get(self, key: str, default: Any = MISSING) -> Any:
        entry = self._entries.get(key)
        return default if entry is None else entry.value

    def entry(self, key: str):
        return self._entries.get(key, MISSING)

    def __getitem__(self, key: str) -> Any:
        return self._entries[key].value

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def contains(self, key: str) -> bool:
        return key in self._entries

    def remove(self, key: str) -> None:
        self._entries.pop(key, None)

    def keys(self) -> Iterator[str]:
        return iter(list(self._entries.keys()))

    def items(self):
        return [(k, e.value) for k, e in self._entries.items()]

    def with_prefix(self, prefix: str) -> Dict[str, KnowledgeEntry]:
        return {k: e for k, e in self._entries.items() if k.startswith(prefix)}

    def __len__(self) -> int:
        return len(self._entries)

    def snapshot(self) -> "KnowledgeDatabase":
        out = KnowledgeDatabase()
        out._entries = {k: KnowledgeEntry(e.kind, copy.deepcopy(e.value), e.timestamp) for k, e in self._entries.items()}
        return out

    def digest_parts(self) -> tuple:
        parts = []
        for key in sorted(self._entries):
            e = self._entries[key]
            if isinstance(e.value, np.ndarray):
                raw = e.value.tobytes()
            else:
                try:
                    raw = pickle.dumps(e.value, protocol=4)
                except Exception:
                    raw = repr(e.value).encode("utf-8")
            parts.append((key, e.kind.value, raw, e.timestamp))
        return tuple(parts)
