"""
Traza CSV de una ejecucion.

Formato (version de esquema en CONF.TRACE.SCHEMA_VERSION):

    # sitaware-trace schema=1.0 seed=<seed> config_hash=<sha256>
    step,time,agent_id,component,phase,belief,risk
    ...filas...
    # end rows=<n>

- `belief` son los floats del vector separados por espacios (repr, ida y vuelta exacta).
- Filas de componentes: una por evento del bus (fase pre/post compute/update, init, error).
- Filas del entorno: component="world", phase="post-step", agent_id = id de entidad,
  belief = estado de la entidad tras el paso.
- El pie permite detectar ficheros truncados.
"""
from __future__ import annotations
import csv
import io
from dataclasses import dataclass
from typing import Dict, Iterable, List

import numpy as np

from configs.package import CONF
from core.events import Event, EventBus, EventFilter
from utils.errors import TraceSchemaError


@dataclass(frozen=True)
class TraceRow:
    step: int
    time: float
    agent_id: int
    component: str
    phase: str
    belief: tuple
    risk: float

    def to_fields(self) -> List[str]:
        return [
            str(self.step),
            repr(float(self.time)),
            str(self.agent_id),
            self.component,
            self.phase,
            " ".join(repr(float(v)) for v in self.belief),
            repr(float(self.risk)),
        ]


@dataclass
class TraceFile:
    meta: Dict[str, str]
    rows: List[TraceRow]

    def world_states(self, entity_id: int) -> Dict[int, np.ndarray]:
        """Estado de una entidad por paso (filas `world`)."""
        return {r.step: np.asarray(r.belief, dtype=float)
                for r in self.rows if r.component == "world" and r.agent_id == entity_id}


class TraceRecorder:
    """
    Descripción
        CLASE: Suscriptor del bus que acumula filas de traza.

    Métodos y Funciones
        - attach(bus, agents): se suscribe a todas las fases.
        - record_world(step, time, world): filas del entorno tras un paso.
        - dumps / write: serializa con cabecera y pie.
    """

    def __init__(self):
        self.rows: List[TraceRow] = []
        self._agents: Dict[int, object] = {}

    def attach(self, bus: EventBus, agents: Iterable) -> None:
        self._agents = {a.id: a for a in agents}
        bus.subscribe(EventFilter(), self._on_event)

    def _on_event(self, event: Event) -> None:
        agent = self._agents.get(event.agent_id)
        belief = tuple(agent.awareness_self.belief.tolist()) if agent is not None else ()
        risk = float(agent.awareness_self.risk) if agent is not None else 0.0
        self.rows.append(TraceRow(
            event.step_index, event.time, event.agent_id, event.component_name, event.phase.value, belief, risk,
        ))

    def record_world(self, step: int, time: float, world) -> None:
        for entity in world.modeled_entities():
            self.rows.append(TraceRow(step, time, entity.id, "world", "post-step", tuple(entity.pose.tolist()), 0.0))

    def dumps(self, seed: int, config_hash: str) -> str:
        buf = io.StringIO()
        buf.write(f"{CONF.TRACE.HEADER_PREFIX} schema={CONF.TRACE.SCHEMA_VERSION} seed={seed} config_hash={config_hash}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CONF.TRACE.COLUMNS)
        for row in self.rows:
            writer.writerow(row.to_fields())
        buf.write(f"{CONF.TRACE.FOOTER_PREFIX}{len(self.rows)}\n")
        return buf.getvalue()

    def write(self, path: str, seed: int, config_hash: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.dumps(seed, config_hash))


def _parse_header(line: str) -> Dict[str, str]:
    if not line.startswith(CONF.TRACE.HEADER_PREFIX):
        raise TraceSchemaError("missing trace header")
    meta = {}
    for token in line[len(CONF.TRACE.HEADER_PREFIX):].split():
        if "=" in token:
            key, value = token.split("=", 1)
            meta[key] = value
    version = meta.get("schema")
    if version is None:
        raise TraceSchemaError("trace header without schema version")
    try:
        major = int(version.split(".")[0])
    except ValueError:
        raise TraceSchemaError("unreadable schema version", version)
    if major != CONF.TRACE.SCHEMA_MAJOR:
        raise TraceSchemaError("unsupported trace schema major version", version)
    return meta


def read_trace(path: str) -> TraceFile:
    """
    Descripción
        FUNCIÓN: Lee y valida una traza escrita por `TraceRecorder.write`.

    Excepciones
        - TraceSchemaError: cabecera ausente, version mayor desconocida, columnas
          distintas, pie ausente (fichero truncado) o numero de filas incoherente.
    """
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    lines = text.split("\n")
    if not lines or not lines[0]:
        raise TraceSchemaError("empty trace file")
    meta = _parse_header(lines[0])
    if not text.endswith("\n") or len(lines) < 3 or not lines[-2].startswith(CONF.TRACE.FOOTER_PREFIX):
        raise TraceSchemaError("truncated trace (missing footer)", meta.get("schema"))
    expected = int(lines[-2][len(CONF.TRACE.FOOTER_PREFIX):])
    body = lines[1:-2]
    reader = csv.reader(body)
    header = next(reader, None)
    if tuple(header or ()) != tuple(CONF.TRACE.COLUMNS):
        raise TraceSchemaError("unexpected trace columns", meta.get("schema"))
    rows: List[TraceRow] = []
    for fields in reader:
        if len(fields) != len(CONF.TRACE.COLUMNS):
            raise TraceSchemaError("malformed trace row", meta.get("schema"))
        step, time, agent_id, component, phase, belief, risk = fields
        rows.append(TraceRow(
            int(step), float(time), int(agent_id), component, phase,
            tuple(float(v) for v in belief.split()) if belief else (), float(risk),
        ))
    if len(rows) != expected:
        raise TraceSchemaError(f"trace has {len(rows)} rows, footer says {expected}", meta.get("schema"))
    return TraceFile(meta, rows)
