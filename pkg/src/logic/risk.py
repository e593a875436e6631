"""
Estimacion Monte-Carlo del riesgo de una especificacion.

    riesgo = P(w no satisface phi) ;  objetivo P(w |= phi) > 1 - epsilon

La cota de Hoeffding da la semiamplitud h = sqrt(ln(2/delta) / (2n)) con
delta = 1 - confianza. El veredicto `passes` es p_hat - h > 1 - epsilon.

Cada muestra i usa su propio flujo (SeedSequence(seed).spawn), asi que el
resultado depende solo de la semilla y las muestras pueden evaluarse en
cualquier orden.
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from configs.package import CONF
from logic.formula import Formula
from logic.ltl import ltl_satisfies
from logic.stl import Trace, stl_satisfies
from utils.errors import ConfigurationError

RolloutSource = Callable[[np.random.Generator], Union[Trace, list]]


@dataclass(frozen=True)
class RiskEstimate:
    p_hat: float
    half_width: float
    n_samples: int
    confidence: float
    passes: Optional[bool] = None

    @property
    def risk(self) -> float:
        return 1.0 - self.p_hat

    @property
    def interval(self):
        return max(0.0, self.p_hat - self.half_width), min(1.0, self.p_hat + self.half_width)


def hoeffding_half_width(n_samples: int, confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise ConfigurationError(f"confidence must lie in (0, 1), got {confidence}")
    delta = 1.0 - confidence
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n_samples))


def _satisfied(sample, formula: Formula) -> bool:
    if isinstance(sample, Trace):
        return stl_satisfies(sample, formula, float(sample.times[0]))
    return ltl_satisfies(sample, 0, formula)


def estimate_risk(
    source: RolloutSource,
    formula: Formula,
    n_samples: int,
    seed: int,
    confidence: float = CONF.TRACE.RISK_CONFIDENCE,
    epsilon: Optional[float] = None,
) -> RiskEstimate:
    """
    Descripción
        FUNCIÓN: Estima P(w |= formula) con `n_samples` ejecuciones i.i.d.

    Argumentos
        - source (Callable[[Generator], Trace | palabra]): genera una ejecucion.
        - formula (Formula)
        - n_samples (int): >= 1.
        - seed (int)
        - confidence (float): nivel de la cota de Hoeffding.
        - epsilon (Optional[float]): riesgo maximo tolerado; activa `passes`.

    Retorno
        - RiskEstimate
    """
    if n_samples < 1:
        raise ConfigurationError(f"n_samples must be >= 1, got {n_samples}")
    children = np.random.SeedSequence(int(seed) & 0xFFFFFFFF).spawn(int(n_samples))
    hits = sum(1 for child in children if _satisfied(source(np.random.default_rng(child)), formula))
    p_hat = hits / n_samples
    half = hoeffding_half_width(n_samples, confidence)
    passes = None if epsilon is None else bool(p_hat - half > 1.0 - float(epsilon))
    return RiskEstimate(p_hat, half, int(n_samples), float(confidence), passes)
