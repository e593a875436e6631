"""
Sistemas de transicion finitos y especificaciones GR(1) (solo datos y validacion).
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import AbstractSet, FrozenSet, Hashable, List, Mapping, Sequence, Tuple

from logic.formula import (
    Always,
    Eventually,
    Formula,
    Next,
    Until,
    conjunction,
    implies,
)
from utils.errors import ConfigurationError

State = Hashable


@dataclass
class FTS:
    """
    Descripción
        CLASE: T = {Q, Q0, F, O, Obs, L}.

    Atributos
        - states (FrozenSet): Q.
        - initial (FrozenSet): Q0 (no vacio, subconjunto de Q).
        - transitions (Dict[q, FrozenSet]): F: Q -> 2^Q.
        - observations (FrozenSet): O.
        - observation_map (Dict[q, o]): Obs: Q -> O.
        - labels (Dict[q, FrozenSet[str]]): L: Q -> 2^AP.
    """
    states: FrozenSet[State]
    initial: FrozenSet[State]
    transitions: Mapping[State, AbstractSet[State]]
    observations: FrozenSet = field(default_factory=frozenset)
    observation_map: Mapping[State, Hashable] = field(default_factory=dict)
    labels: Mapping[State, AbstractSet[str]] = field(default_factory=dict)

    def validate(self) -> None:
        Q = frozenset(self.states)
        if not self.initial:
            raise ConfigurationError("FTS needs at least one initial state")
        if not frozenset(self.initial) <= Q:
            raise ConfigurationError(f"initial states {set(self.initial) - Q} are not in Q")
        for q, succ in self.transitions.items():
            if q not in Q:
                raise ConfigurationError(f"transition from unknown state {q!r}")
            if not frozenset(succ) <= Q:
                raise ConfigurationError(f"transition image of {q!r} leaves Q: {set(succ) - Q}")
        for q, o in self.observation_map.items():
            if q not in Q:
                raise ConfigurationError(f"observation for unknown state {q!r}")
            if o not in self.observations:
                raise ConfigurationError(f"observation {o!r} of {q!r} is not in O")
        for q in self.labels:
            if q not in Q:
                raise ConfigurationError(f"label for unknown state {q!r}")

    def successors(self, q: State) -> FrozenSet[State]:
        return frozenset(self.transitions.get(q, ()))

    @property
    def alphabet(self) -> FrozenSet[str]:
        return frozenset(a for label in self.labels.values() for a in label)

    def word_of(self, path: Sequence[State]) -> List[FrozenSet[str]]:
        """Palabra generada por una ejecucion q0 q1 ... (valida cada transicion)."""
        if not path:
            raise ConfigurationError("empty run")
        if path[0] not in self.initial:
            raise ConfigurationError(f"run starts in non-initial state {path[0]!r}")
        for a, b in zip(path, path[1:]):
            if b not in self.successors(a):
                raise ConfigurationError(f"no transition {a!r} -> {b!r}")
        return [frozenset(self.labels.get(q, ())) for q in path]


def _temporal_free(f: Formula) -> bool:
    return not any(isinstance(n, (Next, Until, Always, Eventually)) for n in f.walk())


def _next_depth(f: Formula) -> int:
    if isinstance(f, Next):
        return 1 + _next_depth(f.child)
    return max((_next_depth(k) for k in f.children()), default=0)


@dataclass
class GR1Spec:
    """
    Descripción
        CLASE: Especificacion GR(1) asuncion-garantia.
        Cada grupo (init, safety, fairness) es una tupla de formulas; safety se
        envuelve en G y fairness en G F al ensamblar. La sintesis no se implementa.
    """
    env_init: Tuple[Formula, ...] = ()
    env_safety: Tuple[Formula, ...] = ()
    env_fairness: Tuple[Formula, ...] = ()
    sys_init: Tuple[Formula, ...] = ()
    sys_safety: Tuple[Formula, ...] = ()
    sys_fairness: Tuple[Formula, ...] = ()

    def validate(self) -> None:
        for name in ("env_init", "sys_init", "env_fairness", "sys_fairness"):
            for f in getattr(self, name):
                if not _temporal_free(f):
                    raise ConfigurationError(f"GR(1) {name} formulas must be temporal-free: {f}")
        for name in ("env_safety", "sys_safety"):
            for f in getattr(self, name):
                if any(isinstance(n, (Until, Always, Eventually)) for n in f.walk()) or _next_depth(f) > 1:
                    raise ConfigurationError(f"GR(1) {name} formulas may only use a single X: {f}")

    def assumption(self) -> Formula:
        return conjunction(
            *self.env_init, *(Always(f) for f in self.env_safety), *(Always(Eventually(f)) for f in self.env_fairness)
        )

    def guarantee(self) -> Formula:
        return conjunction(
            *self.sys_init, *(Always(f) for f in self.sys_safety), *(Always(Eventually(f)) for f in self.sys_fairness)
        )

    def as_formula(self) -> Formula:
        self.validate()
        return implies(self.assumption(), self.guarantee())
