"""
Satisfaccion LTL sobre palabras finitas.

Convencion de traza finita (lectura fuerte):
    - X phi en la ultima posicion es falso.
    - phi U psi exige un testigo psi dentro de la palabra.
    - G phi / F phi recorren el resto de la palabra; con intervalo [a, b] se
      interpretan acotados en pasos: posiciones k + ceil(a) .. k + floor(b)
      recortadas al final de la palabra.
"""
from __future__ import annotations
import math
from typing import AbstractSet, Dict, Iterable, List, Optional, Sequence, Tuple

from logic.formula import (
    Always,
    And,
    AtomicProp,
    Eventually,
    FalseF,
    Formula,
    Next,
    NormPredicate,
    Not,
    Or,
    Predicate,
    TrueF,
    Until,
)
from utils.errors import ConfigurationError, UnknownAtomError, UnsupportedFormulaError

Letter = AbstractSet[str]


class _Evaluator:
    def __init__(self, word: Sequence[Letter], atoms: Optional[AbstractSet[str]]):
        self.word = [frozenset(letter) for letter in word]
        self.n = len(self.word)
        self.atoms = None if atoms is None else frozenset(atoms)
        self.cache: Dict[Tuple[int, int], bool] = {}

    def _window(self, k: int, interval) -> range:
        if interval is None:
            return range(k, self.n)
        lo = k + int(math.ceil(interval.a))
        hi = min(self.n - 1, k + int(math.floor(interval.b)))
        return range(lo, hi + 1)

    def sat(self, f: Formula, k: int) -> bool:
        key = (id(f), k)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        value = self._sat(f, k)
        self.cache[key] = value
        return value

    def _sat(self, f: Formula, k: int) -> bool:
        if isinstance(f, AtomicProp):
            if self.atoms is not None and f.name not in self.atoms:
                raise UnknownAtomError(f"atomic proposition {f.name!r} is not in the alphabet")
            return f.name in self.word[k]
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, (Predicate, NormPredicate)):
            raise UnsupportedFormulaError("real-valued predicates need a trace (use stl_robustness)")
        if isinstance(f, Not):
            return not self.sat(f.child, k)
        if isinstance(f, And):
            return self.sat(f.left, k) and self.sat(f.right, k)
        if isinstance(f, Or):
            return self.sat(f.left, k) or self.sat(f.right, k)
        if isinstance(f, Next):
            return k + 1 < self.n and self.sat(f.child, k + 1)
        if isinstance(f, Until):
            window = self._window(k, f.interval)
            for i in range(k, self.n):
                if i in window and self.sat(f.right, i):
                    return True
                if i >= window.stop - 1 and f.interval is not None:
                    return False
                if not self.sat(f.left, i):
                    return False
            return False
        if isinstance(f, Always):
            return all(self.sat(f.child, i) for i in self._window(k, f.interval))
        if isinstance(f, Eventually):
            return any(self.sat(f.child, i) for i in self._window(k, f.interval))
        raise UnsupportedFormulaError(f"unknown formula node {type(f).__name__}")


def ltl_satisfies(word: Sequence[Iterable[str]], k: int, formula: Formula,
                  atoms: Optional[AbstractSet[str]] = None) -> bool:
    """
    Descripción
        FUNCIÓN: w_k |= formula sobre la palabra finita `word`.

    Argumentos
        - word (Sequence[Iterable[str]]): letras (conjuntos de proposiciones).
        - k (int): posicion, 0 <= k < len(word).
        - formula (Formula): sin predicados reales.
        - atoms (Optional[set]): alfabeto AP; si se da, un atomo fuera de el es un error.

    Excepciones
        - ConfigurationError: palabra vacia o k fuera de rango.
        - UnknownAtomError / UnsupportedFormulaError
    """
    if len(word) == 0:
        raise ConfigurationError("word must be non-empty")
    if not 0 <= k < len(word):
        raise ConfigurationError(f"position {k} outside a word of length {len(word)}")
    return _Evaluator([frozenset(w) for w in word], atoms).sat(formula, int(k))


def ltl_positions(word: Sequence[Iterable[str]], formula: Formula,
                  atoms: Optional[AbstractSet[str]] = None) -> List[bool]:
    """Satisfaccion en cada posicion de la palabra; una sola memoria para todas."""
    if len(word) == 0:
        raise ConfigurationError("word must be non-empty")
    evaluator = _Evaluator([frozenset(w) for w in word], atoms)
    return [evaluator.sat(formula, k) for k in range(evaluator.n)]
