"""
Esquema de los ficheros de escenario.

Descripción
-------------------
    MÓDULO: Un escenario es un JSON con la cabecera comun (name, case, seed,
    mode) y el bloque del caso elegido:
        - "encounter": aparato propio con MPC frente a un intruso de Dubins.
        - "formation": formacion de integradores con CBF.
        - "warehouse": almacen con subasta de tareas por riesgo.
        - "generic": mundo y agentes descritos componente a componente.

    La validacion tiene dos pasadas:
        1) forma (pydantic): tipos, rangos y claves desconocidas;
        2) referencias cruzadas: formulas que se analizan, grafo de tareas en
           arbol, N_r < N, regiones existentes y componentes registrados.

    Cada violacion se devuelve como `Diagnostic(path, message)` con la ruta
    punteada dentro del fichero ("warehouse.schedule.2.origin").

Ficheros referenciados
-------------------
    Un bloque de caso puede ser una cadena: ruta (relativa al escenario) a un
    JSON con el contenido del bloque. Debe existir al validar.
"""
from __future__ import annotations
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from configs.package import CONF
from utils.errors import ConfigurationError, FormulaSyntaxError, SitawareError
from utils.resources import resolve_resource

CASES = ("encounter", "formation", "warehouse", "generic")

Point2 = Annotated[List[float], Field(min_length=2, max_length=2)]
Pose3 = Annotated[List[float], Field(min_length=3, max_length=3)]
Box4 = Annotated[List[float], Field(min_length=4, max_length=4)]


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --------------------
# Encuentro
# --------------------
class MpcBlock(_Block):
    horizon: int = Field(CONF.MPC.HORIZON, ge=1)
    robust_horizon: int = Field(CONF.MPC.ROBUST_HORIZON, ge=0)
    Q: Optional[List[List[float]]] = None
    Q_f: Optional[List[List[float]]] = None
    R: float = Field(1.0, gt=0)
    rho: float = Field(4.0, gt=0)
    v_bounds: Tuple[float, float] = (0.0, 1.0)
    u_bounds: Tuple[float, float] = (-0.3, 0.3)
    intruder_u_bounds: Tuple[float, float] = (-0.2, 0.2)
    intruder_v_max: float = Field(1.0, gt=0)
    t_e: float = Field(1.0, gt=0)
    candidates: int = Field(CONF.MPC.CANDIDATES, ge=8)
    elites: int = Field(CONF.MPC.ELITES, ge=1)
    iterations: int = Field(CONF.MPC.ITERATIONS, ge=1)
    penalty: float = Field(CONF.MPC.PENALTY, ge=0)
    enforce_separation: bool = True

    @model_validator(mode="after")
    def _robust_horizon_below_horizon(self) -> "MpcBlock":
        if self.robust_horizon >= self.horizon:
            raise ValueError(
                f"robust horizon N_r must be < horizon N (N_r={self.robust_horizon}, N={self.horizon})"
            )
        return self


class OwnshipBlock(_Block):
    start: Pose3
    target: Pose3


class IntruderBlock(_Block):
    start: Pose3
    target: Optional[Pose3] = None


class EncounterBlock(_Block):
    mpc: MpcBlock = Field(default_factory=MpcBlock)
    ownship: OwnshipBlock
    intruder: Optional[IntruderBlock] = None
    t_max: int = Field(80, ge=1)


# --------------------
# Formacion
# --------------------
class FormationAgentBlock(_Block):
    id: int
    position: Point2
    input_box: Box4
    task: Optional[str] = None


class FormationEdgeBlock(_Block):
    leader: int
    follower: int
    task: str


class FormationBlock(_Block):
    dt: float = Field(gt=0)
    duration: float = Field(gt=0)
    lam: float = Field(CONF.CBF.LAMBDA, gt=0)
    nu: float = Field(0.02, ge=0)
    bounds: Optional[Box4] = None
    agents: List[FormationAgentBlock] = Field(min_length=1)
    edges: List[FormationEdgeBlock] = Field(default_factory=list)


# --------------------
# Almacen
# --------------------
class LayoutBlock(_Block):
    bounds: Box4
    regions: Dict[str, Box4]
    walls: List[Box4] = Field(default_factory=list)
    margin: float = Field(CONF.TASKING.WALL_MARGIN, ge=0)


class RobotBlock(_Block):
    id: int = Field(ge=1)
    name: str
    home: str
    start: Point2
    max_speed: float = Field(gt=0)
    noise_scale: float = Field(0.0, ge=0)
    quality: str = "standard"


class ScheduleBlock(_Block):
    step: int = Field(ge=0)
    origin: str
    destination: str
    deadline: int = Field(ge=1)


class HomeCallBlock(_Block):
    step: int = Field(ge=0)
    deadline: int = Field(ge=0)


class WarehouseBlock(_Block):
    warehouse: LayoutBlock
    robots: List[RobotBlock] = Field(min_length=1)
    schedule: List[ScheduleBlock] = Field(default_factory=list)
    home_call: Optional[HomeCallBlock] = None
    epsilon: float = Field(CONF.TASKING.RISK_THRESHOLD, ge=0, le=1)
    n_samples: int = Field(CONF.TASKING.RISK_SAMPLES, ge=1)
    steps: int = Field(41, ge=1)
    dt: float = Field(1.0, gt=0)


# --------------------
# Generico
# --------------------
class WorldBlock(_Block):
    bounds: Box4
    dt: float = Field(gt=0)
    obstacles: List[Box4] = Field(default_factory=list)


class ChannelBlock(_Block):
    """Transporte ("inprocess" o "tcp"; con tcp se arranca un hub en host:port, 0 = efimero)."""
    transport: Literal["inprocess", "tcp"] = "inprocess"
    host: str = CONF.COMMS.HUB_HOST
    port: int = Field(CONF.COMMS.HUB_PORT, ge=0, le=65535)
    drop_probability: float = Field(0.0, ge=0, le=1)
    links_down: List[Tuple[int, int]] = Field(default_factory=list)


class EntityBlock(_Block):
    id: Optional[int] = None
    pose: List[float] = Field(min_length=1)
    radius: float = Field(0.0, ge=0)
    model: Optional[Dict[str, Any]] = None


class ComponentBlock(_Block):
    type: str
    name: Optional[str] = None
    gate: Optional[Any] = None
    params: Dict[str, Any] = Field(default_factory=dict)


class AgentBlock(_Block):
    id: int
    entity: Optional[EntityBlock] = None
    knowledge: Dict[str, Any] = Field(default_factory=dict)
    components: List[ComponentBlock] = Field(default_factory=list)
    require_controller: bool = True


class GenericBlock(_Block):
    world: WorldBlock
    channel: ChannelBlock = Field(default_factory=ChannelBlock)
    agents: List[AgentBlock] = Field(min_length=1)
    steps: int = Field(100, ge=1)


# --------------------
# Escenario
# --------------------
class Scenario(_Block):
    """
    Atributos
        - name (str)
        - case (str): uno de CASES; decide que bloque se ejecuta.
        - seed (int): semilla por defecto (el CLI puede sobreescribirla).
        - mode (str): "sync" | "async" (async solo para "generic").
        - wall_duration (float): segundos de reloj en modo async.
        - channel (Optional[ChannelBlock]): transporte de encounter/formation/warehouse;
          los escenarios genericos lo declaran dentro de su bloque.
    """
    name: str = "scenario"
    case: Literal["encounter", "formation", "warehouse", "generic"]
    seed: int = 0
    mode: Literal["sync", "async"] = "sync"
    wall_duration: float = Field(2.0, gt=0)
    channel: Optional[ChannelBlock] = None
    encounter: Optional[EncounterBlock] = None
    formation: Optional[FormationBlock] = None
    warehouse: Optional[WarehouseBlock] = None
    generic: Optional[GenericBlock] = None

    @model_validator(mode="after")
    def _case_block_present(self) -> "Scenario":
        if getattr(self, self.case) is None:
            raise ValueError(f"case {self.case!r} needs a {self.case!r} block")
        if self.mode == "async" and self.case != "generic":
            raise ValueError("async mode is only available for generic scenarios")
        if self.channel is not None and self.case == "generic":
            raise ValueError("generic scenarios declare their channel inside the generic block")
        return self

    @property
    def block(self) -> _Block:
        return getattr(self, self.case)


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path or '<root>'}: {self.message}"


@dataclass
class ValidationReport:
    """Resultado de validar un fichero: escenario (si no hay errores), JSON resuelto y diagnosticos."""
    path: str
    raw: Dict[str, Any] = field(default_factory=dict)
    scenario: Optional[Scenario] = None
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.scenario is not None and not self.diagnostics


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(raw: Dict[str, Any]) -> str:
    """sha256 del JSON canonico del escenario (con los ficheros referenciados ya incluidos)."""
    return hashlib.sha256(canonical_json(raw).encode("utf-8")).hexdigest()


def _loc(loc: Tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc)


def _resolve_includes(raw: Dict[str, Any], base_dir: str, out: List[Diagnostic]) -> Dict[str, Any]:
    resolved = dict(raw)
    for case in CASES:
        ref = resolved.get(case)
        if not isinstance(ref, str):
            continue
        target = os.path.join(base_dir, ref)
        if not os.path.isfile(target):
            out.append(Diagnostic(case, f"referenced file {ref!r} does not exist"))
            continue
        try:
            with open(target, encoding="utf-8") as f:
                resolved[case] = json.load(f)
        except json.JSONDecodeError as err:
            out.append(Diagnostic(case, f"{ref}: invalid JSON at line {err.lineno} column {err.colno}: {err.msg}"))
    return resolved


# --------------------
# Referencias cruzadas
# --------------------
def _check_formula(text: str, path: str, out: List[Diagnostic]) -> None:
    from logic.parser import parse

    try:
        parse(text)
    except FormulaSyntaxError as err:
        out.append(Diagnostic(path, f"formula parse error: {err}"))


def _cross_encounter(block: EncounterBlock, out: List[Diagnostic]) -> None:
    from mpc.config import MpcConfig

    try:
        MpcConfig.from_dict(block.mpc.model_dump(exclude_none=True))
    except ConfigurationError as err:
        out.append(Diagnostic("encounter.mpc", str(err)))


def _cross_formation(block: FormationBlock, out: List[Diagnostic]) -> None:
    from cbf.scenario import FormationConfig

    for k, agent in enumerate(block.agents):
        if agent.task:
            _check_formula(agent.task, f"formation.agents.{k}.task", out)
    for k, edge in enumerate(block.edges):
        _check_formula(edge.task, f"formation.edges.{k}.task", out)
    try:
        FormationConfig.from_dict(block.model_dump(exclude_none=True))
    except ConfigurationError as err:
        out.append(Diagnostic("formation.edges", str(err)))


def _cross_warehouse(block: WarehouseBlock, out: List[Diagnostic]) -> None:
    regions = block.warehouse.regions
    ids = [r.id for r in block.robots]
    if len(set(ids)) != len(ids):
        out.append(Diagnostic("warehouse.robots", f"robot ids must be unique: {ids}"))
    lo_x, lo_y, hi_x, hi_y = block.warehouse.bounds
    for k, robot in enumerate(block.robots):
        if robot.home not in regions:
            out.append(Diagnostic(f"warehouse.robots.{k}.home", f"unknown region {robot.home!r}"))
        x, y = robot.start
        if not (lo_x <= x <= hi_x and lo_y <= y <= hi_y):
            out.append(Diagnostic(f"warehouse.robots.{k}.start", "start lies outside the warehouse bounds"))
    for k, item in enumerate(block.schedule):
        for name in ("origin", "destination"):
            region = getattr(item, name)
            if region not in regions:
                out.append(Diagnostic(f"warehouse.schedule.{k}.{name}", f"unknown region {region!r}"))
    for name, box in regions.items():
        if box[0] >= box[2] or box[1] >= box[3]:
            out.append(Diagnostic(f"warehouse.warehouse.regions.{name}", "degenerate rectangle"))


def _cross_generic(block: GenericBlock, out: List[Diagnostic]) -> None:
    from core.builder import build_from_spec
    from core.component import COMPONENTS

    ids = [a.id for a in block.agents]
    if len(set(ids)) != len(ids):
        out.append(Diagnostic("generic.agents", f"agent ids must be unique: {ids}"))
    for i, agent in enumerate(block.agents):
        for j, comp in enumerate(agent.components):
            if comp.type not in COMPONENTS:
                out.append(Diagnostic(f"generic.agents.{i}.components.{j}.type",
                                      f"unknown component {comp.type!r}; known: {sorted(COMPONENTS)}"))
        for key, value in agent.knowledge.items():
            if isinstance(value, str):
                _check_formula(value, f"generic.agents.{i}.knowledge.{key}", out)
    if out:
        return
    # montaje en seco: parametros de componentes, modelos y poses
    try:
        build_from_spec(block.model_dump(exclude_none=True), seed=0)
    except ConfigurationError as err:
        path = f"generic.{err.path}" if err.path else "generic"
        message = str(err)[len(err.path) + 2:] if err.path else str(err)
        out.append(Diagnostic(path, message))
    except (SitawareError, KeyError, ValueError, TypeError) as err:
        out.append(Diagnostic("generic", f"{type(err).__name__}: {err}"))


_CROSS = {
    "encounter": _cross_encounter,
    "formation": _cross_formation,
    "warehouse": _cross_warehouse,
    "generic": _cross_generic,
}


def validate_config(raw: Any, base_dir: str = ".", path: str = "<memory>") -> ValidationReport:
    """
    Descripción
        FUNCIÓN: Valida un escenario ya cargado en memoria.

    Argumentos
        - raw (Any): contenido JSON decodificado.
        - base_dir (str): carpeta para resolver ficheros referenciados.
        - path (str): nombre para los informes.

    Retorno
        - ValidationReport: `ok` solo si no hay ningun diagnostico.
    """
    report = ValidationReport(path)
    if not isinstance(raw, dict):
        report.diagnostics.append(Diagnostic("", "scenario must be a JSON object"))
        return report
    report.raw = _resolve_includes(raw, base_dir, report.diagnostics)
    if report.diagnostics:
        return report
    # 1) forma
    try:
        scenario = Scenario.model_validate(report.raw)
    except ValidationError as exc:
        for err in exc.errors():
            report.diagnostics.append(Diagnostic(_loc(err["loc"]), err["msg"]))
        return report
    # 2) referencias cruzadas del bloque activo
    _CROSS[scenario.case](scenario.block, report.diagnostics)
    if not report.diagnostics:
        report.scenario = scenario
    return report


def validate_file(path: str) -> ValidationReport:
    """Lee y valida un fichero de escenario; errores de lectura o JSON quedan como diagnosticos."""
    try:
        path = resolve_resource(path)
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as err:
        report = ValidationReport(path)
        report.diagnostics.append(Diagnostic("", f"cannot read {path}: {err.strerror or err}"))
        return report
    except json.JSONDecodeError as err:
        report = ValidationReport(path)
        report.diagnostics.append(Diagnostic("", f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}"))
        return report
    return validate_config(raw, os.path.dirname(os.path.abspath(path)), path)
