"""
Ejecucion de un escenario validado y escritura de artefactos.

Artefactos (en la carpeta de salida)
-------------------
    - trace.csv: traza versionada con semilla y hash de configuracion.
    - metrics.json: metricas del caso con semilla y hash.
    - manifest.json: eco del escenario (ruta, semilla, modo, versiones, bloques).
    - task_report.csv: solo en el almacen, una fila por tarea emitida.
"""
from __future__ import annotations
import csv
import json
import math
import os
import platform
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import lark
import numpy as np
import pydantic

from cbf.scenario import FormationConfig, build_formation, run_formation
from cli.schema import Scenario, config_hash
from comms.channel import Channel
from comms.tcp import open_channel
from configs.package import CONF
from core.builder import build_from_spec
from core.coordinator import Coordinator
from core.rng import substream
from core.trace import TraceRecorder
from mpc.scenario import EncounterSetup, build_encounter, run_encounter
from tasking.warehouse import REPORT_COLUMNS, WarehouseConfig, build_warehouse, run_warehouse
from utils.errors import SitawareError
from utils.logger import get_logger

log = get_logger("Runner")

TRACE_FILE = "trace.csv"
METRICS_FILE = "metrics.json"
MANIFEST_FILE = "manifest.json"
TASK_REPORT_FILE = "task_report.csv"


class RunFailure(SitawareError):
    """Fallo en tiempo de ejecucion con el paso en el que ocurrio."""

    def __init__(self, step: int, cause: BaseException):
        self.step = int(step)
        self.cause = cause
        super().__init__(f"run failed at step {self.step}: {type(cause).__name__}: {cause}")


@dataclass
class RunArtifacts:
    output_dir: str
    seed: int
    config_hash: str
    files: Dict[str, str] = field(default_factory=dict)
    metrics: Dict[str, Any] = field(default_factory=dict)


def _jsonable(value: Any) -> Any:
    """Convierte numpy y no finitos (NaN/inf -> null) a tipos JSON."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def versions() -> Dict[str, str]:
    return {
        "sitaware": CONF.CONST.VERSION,
        "trace_schema": CONF.TRACE.SCHEMA_VERSION,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "pydantic": pydantic.VERSION,
        "lark": lark.__version__,
    }


# --------------------
# Casos
# --------------------
CaseResult = Tuple[Dict[str, Any], TraceRecorder, Optional[list]]


def _channel(scenario: Scenario, seed: int) -> Optional[Channel]:
    """Canal de la cabecera del escenario; None deja el canal en memoria del caso."""
    block = scenario.channel
    if block is None:
        return None
    return open_channel(block.transport, block.drop_probability, block.links_down,
                        substream(seed, "channel"), block.host, block.port)


def _encounter(scenario: Scenario, seed: int) -> Tuple[Coordinator, Callable[[Coordinator], CaseResult]]:
    setup = EncounterSetup.from_dict(scenario.encounter.model_dump(exclude_none=True))
    coord = build_encounter(setup.config, setup.ownship_start, setup.ownship_target,
                            setup.intruder_start, setup.intruder_target, seed,
                            channel=_channel(scenario, seed))

    def run(c: Coordinator) -> CaseResult:
        result = run_encounter(setup, seed, coordinator=c)
        return result.metrics(), c.recorder, None
    return coord, run


def _formation(scenario: Scenario, seed: int) -> Tuple[Coordinator, Callable[[Coordinator], CaseResult]]:
    cfg = FormationConfig.from_dict(scenario.formation.model_dump(exclude_none=True))
    coord = build_formation(cfg, seed, _channel(scenario, seed))

    def run(c: Coordinator) -> CaseResult:
        result = run_formation(cfg, seed, coordinator=c)
        return result.metrics(), c.recorder, None
    return coord, run


def _warehouse(scenario: Scenario, seed: int) -> Tuple[Coordinator, Callable[[Coordinator], CaseResult]]:
    cfg = WarehouseConfig.from_dict(scenario.warehouse.model_dump(exclude_none=True))
    coord = build_warehouse(cfg, seed, _channel(scenario, seed))

    def run(c: Coordinator) -> CaseResult:
        result = run_warehouse(cfg, seed, coordinator=c)
        return result.metrics(), c.recorder, result.report_rows()
    return coord, run


def _generic(scenario: Scenario, seed: int) -> Tuple[Coordinator, Callable[[Coordinator], CaseResult]]:
    block = scenario.generic
    coord = build_from_spec(block.model_dump(exclude_none=True), seed)

    def run(c: Coordinator) -> CaseResult:
        c.initialize()
        if scenario.mode == "async":
            trace = c.run_async(scenario.wall_duration)
        else:
            trace = c.run_sync(block.steps)
        reports = trace.reports
        stats = c.channel.stats
        metrics = {
            "steps": trace.steps,
            "collisions": sum(len(r.collisions) for r in reports),
            "boundary_violations": sum(len(r.boundary_violations) for r in reports),
            "messages": {"sent": stats.sent, "delivered": stats.delivered, "dropped": stats.dropped},
            "belief": {str(a.id): a.awareness_self.belief for a in c.agents},
            "risk": {str(a.id): a.awareness_self.risk for a in c.agents},
        }
        return metrics, c.recorder, None
    return coord, run


CASE_RUNNERS = {
    "encounter": _encounter,
    "formation": _formation,
    "warehouse": _warehouse,
    "generic": _generic,
}


def run_scenario(scenario: Scenario, raw: Dict[str, Any], output_dir: str, scenario_path: str = "",
                 seed: Optional[int] = None) -> RunArtifacts:
    """
    Descripción
        FUNCIÓN: Ejecuta el caso del escenario y escribe sus artefactos.

    Argumentos
        - scenario (Scenario): ya validado.
        - raw (Dict[str, Any]): JSON resuelto del escenario (base del hash).
        - output_dir (str): carpeta de salida (se crea).
        - scenario_path (str): ruta del fichero, para el manifiesto.
        - seed (Optional[int]): sobreescribe `scenario.seed`.

    Retorno
        - RunArtifacts

    Excepciones
        - RunFailure: cualquier error durante la simulacion, con el paso.
    """
    seed = scenario.seed if seed is None else int(seed)
    chash = config_hash(raw)
    os.makedirs(output_dir, exist_ok=True)
    coord, run = CASE_RUNNERS[scenario.case](scenario, seed)

    # 1) simulacion
    try:
        metrics, recorder, task_rows = run(coord)
    except Exception as err:
        step = coord.context.clock.step
        log.error("%s failed at step %d: %s", scenario.name, step, err, exc_info=CONF.DEV.DEBUG)
        raise RunFailure(step, err) from err
    finally:
        coord.close()

    # 2) artefactos
    artifacts = RunArtifacts(output_dir, seed, chash)
    trace_path = os.path.join(output_dir, TRACE_FILE)
    recorder.write(trace_path, seed, chash)
    artifacts.files["trace"] = trace_path

    artifacts.metrics = _jsonable({"case": scenario.case, "seed": seed, "config_hash": chash, **metrics})
    metrics_path = os.path.join(output_dir, METRICS_FILE)
    with open(metrics_path, "w", encoding="utf-8") as f:
        json.dump(artifacts.metrics, f, indent=2, sort_keys=True)
    artifacts.files["metrics"] = metrics_path

    if task_rows is not None:
        report_path = os.path.join(output_dir, TASK_REPORT_FILE)
        with open(report_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(REPORT_COLUMNS), lineterminator="\n")
            writer.writeheader()
            for row in task_rows:
                writer.writerow({k: ("" if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()})
        artifacts.files["task_report"] = report_path

    manifest = {
        "scenario": os.path.abspath(scenario_path) if scenario_path else "",
        "name": scenario.name,
        "case": scenario.case,
        "seed": seed,
        "mode": scenario.mode,
        "output_dir": os.path.abspath(output_dir),
        "config_hash": chash,
        "versions": versions(),
        "config": {scenario.case: raw.get(scenario.case)},
        "files": {k: os.path.basename(v) for k, v in artifacts.files.items()},
    }
    manifest_path = os.path.join(output_dir, MANIFEST_FILE)
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(manifest), f, indent=2, sort_keys=True)
    artifacts.files["manifest"] = manifest_path
    log.info("%s: artifacts in %s", scenario.name, output_dir)
    return artifacts
