"""
Builder para convertir la descripcion declarativa (dict) de un escenario en un
Coordinator listo para ejecutar.

Propósito
---------
Los casos de uso montan sus agentes en codigo; los escenarios genericos los
describen en JSON. Este modulo resuelve:
  - el mundo (limites, periodo, obstaculos),
  - las entidades y sus modelos (`environment.models.build_model`),
  - los componentes (claves -> clases registradas en `COMPONENTS`),
  - el conocimiento inicial (listas -> vectores, textos -> formulas),
  - el canal (en memoria o TCP con hub propio, descartes, enlaces cortados).

Formato esperado
----------------
spec = {
  "world": {"bounds": [x0, y0, x1, y1], "dt": 0.1, "obstacles": [[...], ...]},
  "channel": {"transport": "inprocess", "drop_probability": 0.0, "links_down": [[1, 2], ...]},
  "agents": [
    {
      "id": 1,
      "entity": {"pose": [0, 0], "radius": 0.2,
                 "model": {"kind": "single-integrator", "dim": 2, "input_low": [...], ...}},
      "knowledge": {"goal": [5, 5], "task:self": "F[0,10] (x1 >= 4)"},
      "components": [{"type": "perception"}, {"type": "goal-controller", "params": {...}}],
      "require_controller": true
    }
  ]
}

A diferencia de una carga tolerante, cualquier clave desconocida es un error de
configuracion con la ruta del campo.
"""
from __future__ import annotations
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np

# Importados por su efecto: registran sus componentes en COMPONENTS
import cbf.components  # noqa: F401
import core.components  # noqa: F401
import mpc.components  # noqa: F401
import tasking.components  # noqa: F401

from comms.tcp import open_channel
from configs.package import CONF
from core.agent import Agent
from core.component import COMPONENTS, Component
from core.coordinator import Coordinator
from core.gates import EventGate, Gate, PeriodicGate
from core.rng import substream
from environment.entity import Disc, Entity
from environment.geometry import Rect
from environment.models import build_model
from environment.world import World2D
from logic.parser import parse
from tasking.components import HomeCall, ScheduledTask
from tasking.regions import Warehouse
from tasking.tasks import CapabilityProfile
from utils.errors import ConfigurationError, FormulaSyntaxError, SitawareError
from utils.logger import get_logger

log = get_logger("Builder")


# --------------------
# Parametros de componentes
# --------------------
# Parametros que llegan como JSON y el componente espera como objeto
PARAM_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "profile": lambda v: CapabilityProfile(**v),
    "warehouse": Warehouse.from_dict,
    "schedule": lambda v: [ScheduledTask(**s) for s in v],
    "home_call": lambda v: None if v is None else HomeCall(**v),
    "robots": lambda v: {int(k): str(r) for k, r in dict(v).items()},
}


def _gate(raw: Any, path: str) -> Optional[Gate]:
    if raw is None:
        return None
    if raw == "event":
        return EventGate()
    if isinstance(raw, Mapping) and "period" in raw:
        return PeriodicGate(float(raw["period"]))
    raise ConfigurationError("gate must be 'event' or {'period': seconds}", path)


def resolve_component(data: Mapping[str, Any], path: str = "component") -> Component:
    """
    Descripción
        FUNCIÓN: Crea un componente a partir de {"type", "name"?, "gate"?, "params"?}.

    Argumentos
        - data (Mapping[str, Any]): descripcion del componente.
        - path (str): ruta del campo para los mensajes de error.

    Retorno
        - Component

    Excepciones
        - ConfigurationError: tipo no registrado o parametros no aceptados.
    """
    key = data.get("type")
    cls = COMPONENTS.get(key)
    if cls is None:
        raise ConfigurationError(f"unknown component {key!r}; known: {sorted(COMPONENTS)}", f"{path}.type")
    params = dict(data.get("params") or {})
    for name, convert in PARAM_CONVERTERS.items():
        if name in params:
            try:
                params[name] = convert(params[name])
            except (TypeError, KeyError, ValueError, SitawareError) as err:
                raise ConfigurationError(f"invalid value: {err}", f"{path}.params.{name}") from err
    if data.get("name"):
        params["name"] = str(data["name"])
    gate = _gate(data.get("gate"), f"{path}.gate")
    if gate is not None:
        params["gate"] = gate
    try:
        return cls(**params)
    except TypeError as err:
        raise ConfigurationError(f"{key}: {err}", f"{path}.params") from err


def _knowledge_value(value: Any, path: str) -> Any:
    if isinstance(value, str):
        try:
            return parse(value)
        except FormulaSyntaxError as err:
            raise ConfigurationError(str(err), path) from err
    if isinstance(value, list):
        return np.asarray(value, dtype=float)
    return value


def _entity(agent_id: int, data: Mapping[str, Any], path: str) -> Entity:
    model_data = dict(data.get("model") or {})
    model = None
    if model_data:
        kind = model_data.pop("kind", None)
        try:
            model = build_model(kind, **model_data)
        except TypeError as err:
            raise ConfigurationError(str(err), f"{path}.model") from err
    entity_id = int(data.get("id", agent_id))
    return Entity(entity_id, data["pose"], model, Disc(float(data.get("radius", 0.0))))


def build_world(data: Mapping[str, Any], seed: int = 0) -> World2D:
    obstacles = [Rect.from_list(o) for o in data.get("obstacles", [])]
    return World2D(Rect.from_list(data["bounds"]), float(data["dt"]), seed, obstacles)


def build_from_spec(spec: Mapping[str, Any], seed: int = 0) -> Coordinator:
    """
    Descripción
        FUNCIÓN: Toma la descripcion declarativa y devuelve el Coordinator con
        mundo, canal y agentes montados (sin inicializar).

    Argumentos
        - spec (Mapping[str, Any]): ver el formato en la cabecera del modulo.
        - seed (int): semilla del mundo, del canal y del contexto.

    Retorno
        - Coordinator

    Excepciones
        - ConfigurationError: cualquier campo invalido, con su ruta.
    """
    if not isinstance(spec, Mapping):
        raise ConfigurationError("scenario must be a mapping")
    world = build_world(spec["world"], seed)

    # 1) agentes, sus entidades y su conocimiento
    agents: List[Agent] = []
    for k, raw in enumerate(spec.get("agents", [])):
        path = f"agents.{k}"
        agent_id = int(raw["id"])
        entity_id = None
        if raw.get("entity") is not None:
            entity = world.add_entity(_entity(agent_id, raw["entity"], f"{path}.entity"))
            entity_id = entity.id
        agent = Agent(agent_id, entity_id=entity_id, require_controller=bool(raw.get("require_controller", True)))
        for key, value in (raw.get("knowledge") or {}).items():
            agent.knowledge.set(key, _knowledge_value(value, f"{path}.knowledge.{key}"))
        # 2) componentes por nombre de registro
        for j, comp in enumerate(raw.get("components", [])):
            agent.add_component(resolve_component(comp, f"{path}.components.{j}"))
        agents.append(agent)

    # 3) canal
    channel_data = spec.get("channel") or {}
    channel = open_channel(
        str(channel_data.get("transport", "inprocess")),
        drop_probability=float(channel_data.get("drop_probability", 0.0)),
        links_down=channel_data.get("links_down", []),
        rng=substream(seed, "channel"),
        host=str(channel_data.get("host", CONF.COMMS.HUB_HOST)),
        port=int(channel_data.get("port", CONF.COMMS.HUB_PORT)),
    )
    log.debug("built %d agents, %d entities", len(agents), len(world.modeled_entities()))
    return Coordinator(world, agents, channel, seed=seed)
