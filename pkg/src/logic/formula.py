"""
AST de formulas LTL/STL.

Descripción
-------------------
    MÓDULO: Nodos inmutables (dataclasses congeladas, comparables y hashables):
        - Proposiciones: AtomicProp, Predicate (a.x + c >= 0), NormPredicate,
          TrueF, FalseF.
        - Booleanos: Not, And, Or.
        - Temporales: Next, Until, Always, Eventually. Until/Always/Eventually
          aceptan un intervalo [a, b] (STL, o acotado en pasos en LTL); sin
          intervalo cubren el resto de la traza.

    `to_text` imprime con parentesis completos y floats `repr` (infinitos como
    1e999), de modo que parse(to_text(f)) == f.
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import FrozenSet, Iterator, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ConfigurationError


def number_text(value: float) -> str:
    """Literal numerico que el parser acepta; los infinitos salen como 1e999."""
    value = float(value)
    if math.isinf(value):
        return "1e999" if value > 0 else "-1e999"
    return repr(value)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a <= self.b) or math.isnan(self.b):
            raise ConfigurationError(f"interval must satisfy 0 <= a <= b, got [{self.a}, {self.b}]")

    def text(self) -> str:
        return f"[{number_text(self.a)},{number_text(self.b)}]"


class Formula:
    """Base de todos los nodos."""

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def depth(self) -> int:
        kids = self.children()
        return 0 if not kids else 1 + max(k.depth() for k in kids)

    def walk(self) -> Iterator["Formula"]:
        yield self
        for k in self.children():
            yield from k.walk()

    def atoms(self) -> FrozenSet[str]:
        return frozenset(n.name for n in self.walk() if isinstance(n, AtomicProp))

    def has_predicates(self) -> bool:
        return any(isinstance(n, (Predicate, NormPredicate)) for n in self.walk())

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


def _affine_text(coeffs: Sequence[float], constant: float) -> str:
    parts = []
    for i, c in enumerate(coeffs):
        term = f"{number_text(abs(float(c)))}*x{i + 1}"
        if not parts:
            parts.append(f"-{term}" if math.copysign(1.0, c) < 0 else term)
        else:
            parts.append(f"- {term}" if math.copysign(1.0, c) < 0 else f"+ {term}")
    c = float(constant)
    if not parts:
        return number_text(c)
    if c != 0.0 or math.copysign(1.0, c) < 0:
        parts.append(f"- {number_text(abs(c))}" if math.copysign(1.0, c) < 0 else f"+ {number_text(c)}")
    return " ".join(parts)


def _strip(coeffs: Sequence[float]) -> Tuple[float, ...]:
    out = [float(c) for c in coeffs]
    while out and out[-1] == 0.0:
        out.pop()
    return tuple(out)


def _affine_value(coeffs: Tuple[float, ...], constant: float, x: np.ndarray) -> float:
    n = len(coeffs)
    if n > x.shape[-1]:
        raise ConfigurationError(f"predicate uses x{n} but the state has dimension {x.shape[-1]}")
    return float(np.dot(coeffs, x[:n]) + constant) if n else float(constant)


@dataclass(frozen=True)
class AtomicProp(Formula):
    name: str

    def to_text(self) -> str:
        return self.name


@dataclass(frozen=True)
class TrueF(Formula):
    def to_text(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseF(Formula):
    def to_text(self) -> str:
        return "false"


@dataclass(frozen=True)
class Predicate(Formula):
    """a . x + c >= 0 sobre x = (x1, ..., xn). Los ceros finales de `coeffs` se eliminan."""
    coeffs: Tuple[float, ...]
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))
        object.__setattr__(self, "constant", float(self.constant))

    def value(self, x) -> float:
        return _affine_value(self.coeffs, self.constant, np.asarray(x, dtype=float))

    def gradient(self, dim: int) -> np.ndarray:
        g = np.zeros(dim)
        g[:len(self.coeffs)] = self.coeffs
        return g

    @property
    def concave(self) -> bool:
        return True

    def to_text(self) -> str:
        return f"({_affine_text(self.coeffs, self.constant)} >= 0)"


@dataclass(frozen=True)
class NormPredicate(Formula):
    """
    norm(e1(x), ..., em(x)) <= r  (sense "<=")  ->  valor r - ||e(x)||
    norm(e1(x), ..., em(x)) >= r  (sense ">=")  ->  valor ||e(x)|| - r
    Cada fila e_i es afin: (coeficientes, constante).
    """
    rows: Tuple[Tuple[Tuple[float, ...], float], ...]
    radius: float
    sense: str = "<="

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ConfigurationError(f"norm predicate sense must be '<=' or '>=', got {self.sense!r}")
        if not self.rows:
            raise ConfigurationError("norm predicate needs at least one component")
        object.__setattr__(self, "rows", tuple((_strip(c), float(k)) for c, k in self.rows))
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def ball(cls, center: Sequence[float], radius: float, offset: int = 0) -> "NormPredicate":
        """||x[offset:offset+d] - center|| <= radius."""
        rows = []
        for i, c in enumerate(center):
            coeffs = [0.0] * (offset + i) + [1.0]
            rows.append((tuple(coeffs), -float(c)))
        return cls(tuple(rows), radius, "<=")

    def residual(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([_affine_value(c, k, x) for c, k in self.rows])

    def value(self, x) -> float:
        n = float(np.linalg.norm(self.residual(x)))
        return self.radius - n if self.sense == "<=" else n - self.radius

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        e = self.residual(x)
        n = float(np.linalg.norm(e))
        jac = np.zeros((len(self.rows), x.size))
        for i, (c, _) in enumerate(self.rows):
            jac[i, :len(c)] = c
        if n == 0.0:
            return np.zeros(x.size)
        g = jac.T @ e / n
        return -g if self.sense == "<=" else g

    @property
    def concave(self) -> bool:
        return self.sense == "<="

    def to_text(self) -> str:
        inner = ", ".join(_affine_text(c, k) for c, k in self.rows)
        return f"(norm({inner}) {self.sense} {number_text(self.radius)})"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def children(self):
        return (self.child,)

    def to_text(self) -> str:
        return f"!{self.child.to_text()}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        return f"({self.left.to_text()} & {self.right.to_text()})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        return f"({self.left.to_text()} | {self.right.to_text()})"


@dataclass(frozen=True)
class Next(Formula):
    child: Formula

    def children(self):
        return (self.child,)

    def to_text(self) -> str:
        return f"X {self.child.to_text()}"


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    interval: Optional[Interval] = None

    def children(self):
        return (self.left, self.right)

    def to_text(self) -> str:
        op = "U" if self.interval is None else f"U{self.interval.text()}"
        return f"({self.left.to_text()} {op} {self.right.to_text()})"


@dataclass(frozen=True)
class Always(Formula):
    child: Formula
    interval: Optional[Interval] = None

    def children(self):
        return (self.child,)

    def to_text(self) -> str:
        op = "G" if self.interval is None else f"G{self.interval.text()}"
        return f"{op} {self.child.to_text()}"


@dataclass(frozen=True)
class Eventually(Formula):
    child: Formula
    interval: Optional[Interval] = None

    def children(self):
        return (self.child,)

    def to_text(self) -> str:
        op = "F" if self.interval is None else f"F{self.interval.text()}"
        return f"{op} {self.child.to_text()}"


# --------------------
# Constructores
# --------------------
def conjunction(*formulas: Formula) -> Formula:
    if not formulas:
        return TrueF()
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


def disjunction(*formulas: Formula) -> Formula:
    if not formulas:
        return FalseF()
    out = formulas[0]
    for f in formulas[1:]:
        out = Or(out, f)
    return out


def implies(left: Formula, right: Formula) -> Formula:
    return Or(Not(left), right)


def always(child: Formula, a: Optional[float] = None, b: Optional[float] = None) -> Always:
    return Always(child, None if a is None else Interval(float(a), float(b)))


def eventually(child: Formula, a: Optional[float] = None, b: Optional[float] = None) -> Eventually:
    return Eventually(child, None if a is None else Interval(float(a), float(b)))


def in_box(lo: Sequence[float], hi: Sequence[float], offset: int = 0) -> Formula:
    """Conjuncion de predicados afines lo_i <= x_{offset+i} <= hi_i."""
    parts = []
    for i, (l, h) in enumerate(zip(lo, hi)):
        unit = [0.0] * (offset + i) + [1.0]
        parts.append(Predicate(tuple(unit), -float(l)))
        parts.append(Predicate(tuple(-u for u in unit), float(h)))
    return conjunction(*parts)
