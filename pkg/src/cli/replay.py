"""
Recalculo de metricas a partir de una traza, sin volver a simular.

Las filas `world` de la traza guardan la pose de cada entidad tras cada paso
del entorno; la muestra inicial sale del escenario. El escenario se localiza
por el manifiesto que `run` deja junto a la traza (o se pasa explicitamente) y
su hash debe coincidir con el de la cabecera de la traza.
"""
from __future__ import annotations
import csv
import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np

from cbf.scenario import FormationConfig, monitored_barriers
from cli.runner import MANIFEST_FILE
from cli.schema import Scenario, config_hash, validate_file
from core.trace import TraceFile, read_trace
from logic.stl import Trace, stl_robustness
from mpc.scenario import INTRUDER_ID, OWNSHIP_ID, EncounterSetup
from mpc.tree import separation
from utils.errors import ConfigHashMismatchError, ConfigurationError
from utils.logger import get_logger

log = get_logger("Replay")


@dataclass
class Series:
    """Tabla de salida: columnas y filas en orden."""
    columns: Sequence[str]
    rows: List[tuple]

    def write_csv(self, out: TextIO) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _world_path(trace: TraceFile, entity_id: int, initial: Sequence[float]) -> np.ndarray:
    states = trace.world_states(entity_id)
    return np.array([np.asarray(initial, dtype=float)] + [states[k] for k in sorted(states)])


# --------------------
# Metricas
# --------------------
def separation_series(trace: TraceFile, scenario: Scenario) -> Series:
    """Separacion real aparato propio / intruso tras cada paso (igual que metrics.json)."""
    setup = EncounterSetup.from_dict(scenario.encounter.model_dump(exclude_none=True))
    own = trace.world_states(OWNSHIP_ID)
    intruder = trace.world_states(INTRUDER_ID)
    if not intruder:
        raise ConfigurationError("separation needs an intruder in the encounter")
    rows = []
    for step in sorted(set(own) & set(intruder)):
        sep = float(separation(own[step], intruder[step], setup.config.R))
        rows.append((step, (step + 1) * setup.config.t_e, sep))
    return Series(("step", "time", "separation"), rows)


def barrier_series(trace: TraceFile, scenario: Scenario) -> Series:
    """Valor de cada barrera vigilada por muestra (NaN cuando no esta activa)."""
    cfg = FormationConfig.from_dict(scenario.formation.model_dump(exclude_none=True))
    paths = {i: _world_path(trace, i, cfg.positions[i]) for i in cfg.graph.vertices}
    samples = min(len(p) for p in paths.values())
    rows = []
    for name, barrier, ids in monitored_barriers(cfg):
        for k in range(samples):
            t = k * cfg.dt
            z = np.concatenate([paths[j][k] for j in ids])
            value = barrier.value(z, t) if barrier.active(t) else math.nan
            rows.append((k, t, name, float(value)))
    return Series(("sample", "time", "barrier", "value"), rows)


def robustness_series(trace: TraceFile, scenario: Scenario) -> Series:
    """Robustez en t=0 de la tarea local de cada agente sobre la trayectoria completa."""
    cfg = FormationConfig.from_dict(scenario.formation.model_dump(exclude_none=True))
    paths = {i: _world_path(trace, i, cfg.positions[i]) for i in cfg.graph.vertices}
    rows = []
    for i in cfg.graph.vertices:
        values = []
        for formula, ids in cfg.local_task(i):
            signal = np.hstack([paths[j] for j in ids])
            values.append(stl_robustness(Trace.uniform(signal, cfg.dt), formula, 0.0))
        rows.append((i, float(min(values)) if values else math.inf))
    return Series(("agent_id", "robustness"), rows)


METRICS: Dict[str, tuple] = {
    "separation": (("encounter",), separation_series),
    "barrier": (("formation",), barrier_series),
    "robustness": (("formation",), robustness_series),
}


def _scenario_path(trace_path: str, scenario_path: Optional[str]) -> str:
    if scenario_path:
        return scenario_path
    manifest = os.path.join(os.path.dirname(os.path.abspath(trace_path)), MANIFEST_FILE)
    if not os.path.isfile(manifest):
        raise ConfigurationError("no manifest next to the trace; pass the scenario explicitly", "scenario")
    with open(manifest, encoding="utf-8") as f:
        path = json.load(f).get("scenario")
    if not path:
        raise ConfigurationError("manifest does not name a scenario file", "scenario")
    return path


def replay(trace_path: str, metric: str, scenario_path: Optional[str] = None, force: bool = False) -> Series:
    """
    Descripción
        FUNCIÓN: Recalcula una metrica derivada a partir de la traza.

    Argumentos
        - trace_path (str): traza escrita por `run`.
        - metric (str): "separation" | "barrier" | "robustness".
        - scenario_path (Optional[str]): por defecto el del manifiesto junto a la traza.
        - force (bool): acepta un hash de configuracion distinto.

    Retorno
        - Series

    Excepciones
        - TraceSchemaError: traza truncada o de version desconocida.
        - ConfigHashMismatchError: el escenario no es el que produjo la traza.
        - ConfigurationError: metrica desconocida o no aplicable al caso.
    """
    if metric not in METRICS:
        raise ConfigurationError(f"unknown metric {metric!r}; known: {sorted(METRICS)}", "metric")
    trace = read_trace(trace_path)
    path = _scenario_path(trace_path, scenario_path)
    report = validate_file(path)
    if not report.ok:
        raise ConfigurationError("; ".join(str(d) for d in report.diagnostics), path)
    expected = trace.meta.get("config_hash")
    actual = config_hash(report.raw)
    if expected != actual:
        if not force:
            raise ConfigHashMismatchError(f"trace config hash {expected} does not match scenario {actual}")
        log.warning("config hash mismatch ignored (%s != %s)", expected, actual)
    cases, compute = METRICS[metric]
    scenario = report.scenario
    if scenario.case not in cases:
        raise ConfigurationError(f"metric {metric!r} is not available for case {scenario.case!r}", "metric")
    compute_fn: Callable[[TraceFile, Scenario], Series] = compute
    return compute_fn(trace, scenario)
