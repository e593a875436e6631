"""
Parser de formulas sobre una gramatica Lark (LALR).

Precedencia de mayor a menor: ! > X > & > | > U; los prefijos G/F van al nivel
de X y U asocia a la derecha. Las variables de estado se escriben x1, x2, ...
(x1 es la primera componente); cualquier otro identificador que no sea palabra
clave es una proposicion atomica.

Ejemplos: "p U q", "!(p & q)", "F[0,7] (x1 - 1 >= 0)", "G[0,40] (norm(x1 - 3, x2) <= 0.5)".
"""
from __future__ import annotations
from typing import Dict, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from logic.formula import (
    Always,
    And,
    AtomicProp,
    Eventually,
    FalseF,
    Formula,
    Interval,
    Next,
    NormPredicate,
    Not,
    Or,
    Predicate,
    TrueF,
    Until,
)
from utils.errors import ConfigurationError, FormulaSyntaxError, SitawareError

GRAMMAR = r"""
    ?start: formula

    ?formula: disj
            | disj "U" [interval] formula      -> until

    ?disj: conj
         | disj "|" conj                       -> or_

    ?conj: unary
         | conj "&" unary                      -> and_

    ?unary: "!" unary                          -> not_
          | "X" unary                          -> next_
          | "G" [interval] unary               -> always
          | "F" [interval] unary               -> eventually
          | primary

    ?primary: "true"                           -> true_
            | "false"                          -> false_
            | NAME                             -> atom
            | "(" formula ")"
            | affine REL affine                -> predicate
            | "norm" "(" affine ("," affine)* ")" REL NUMBER -> norm_predicate

    interval: LBRACK NUMBER "," NUMBER "]"

    affine: term ((PLUS | MINUS) term)*

    ?term: MINUS term                          -> neg
         | NUMBER "*" VAR                      -> scaled
         | NUMBER                              -> const
         | VAR                                 -> var

    REL: ">=" | "<="
    LBRACK: "["
    PLUS: "+"
    MINUS: "-"
    VAR.2: /x[1-9][0-9]*(?![A-Za-z0-9_])/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    NUMBER: /(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?/

    %import common.WS
    %ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr", maybe_placeholders=True)

# Termino de una expresion afin: (indice de variable o None, coeficiente)
Term = Tuple[Optional[int], float]
Affine = Tuple[Dict[int, float], float]


@v_args(inline=True)
class FormulaBuilder(Transformer):
    """Convierte el arbol de Lark en nodos de `logic.formula`."""

    # --------------------
    # Formulas
    # --------------------
    def until(self, left, interval, right):
        return Until(left, right, interval)

    def or_(self, left, right):
        return Or(left, right)

    def and_(self, left, right):
        return And(left, right)

    def not_(self, child):
        return Not(child)

    def next_(self, child):
        return Next(child)

    def always(self, interval, child):
        return Always(child, interval)

    def eventually(self, interval, child):
        return Eventually(child, interval)

    def true_(self):
        return TrueF()

    def false_(self):
        return FalseF()

    def atom(self, name: Token):
        return AtomicProp(str(name))

    def interval(self, bracket: Token, a: Token, b: Token) -> Interval:
        try:
            return Interval(float(a), float(b))
        except ConfigurationError as err:
            raise FormulaSyntaxError(str(err), bracket.start_pos)

    # --------------------
    # Predicados
    # --------------------
    def predicate(self, lhs: Affine, rel: Token, rhs: Affine) -> Predicate:
        (lhs_c, lhs_k), (rhs_c, rhs_k) = lhs, rhs
        sign = 1.0 if str(rel) == ">=" else -1.0
        n = max([0, *lhs_c.keys(), *rhs_c.keys()])
        coeffs = [sign * (lhs_c.get(i, 0.0) - rhs_c.get(i, 0.0)) for i in range(1, n + 1)]
        return Predicate(tuple(coeffs), sign * (lhs_k - rhs_k))

    def norm_predicate(self, *args) -> NormPredicate:
        *rows, rel, radius = args
        parts = []
        for coeffs, constant in rows:
            n = max([0, *coeffs.keys()])
            parts.append((tuple(coeffs.get(i, 0.0) for i in range(1, n + 1)), constant))
        return NormPredicate(tuple(parts), float(radius), str(rel))

    def affine(self, first: Term, *rest) -> Affine:
        coeffs: Dict[int, float] = {}
        constant = 0.0
        signed = [(1.0, first)] + [(1.0 if str(op) == "+" else -1.0, t) for op, t in zip(rest[::2], rest[1::2])]
        for sign, (idx, value) in signed:
            if idx is None:
                constant += sign * value
            else:
                coeffs[idx] = coeffs.get(idx, 0.0) + sign * value
        return coeffs, constant

    def neg(self, _minus: Token, term: Term) -> Term:
        idx, value = term
        return idx, -value

    def scaled(self, number: Token, var: Token) -> Term:
        return int(str(var)[1:]), float(number)

    def const(self, number: Token) -> Term:
        return None, float(number)

    def var(self, var: Token) -> Term:
        return int(str(var)[1:]), 1.0


def _syntax_error(text: str, err: UnexpectedInput) -> FormulaSyntaxError:
    if isinstance(err, UnexpectedCharacters):
        pos = err.pos_in_stream
        return FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
    if isinstance(err, UnexpectedToken) and err.token.type != "$END":
        expected = ", ".join(sorted(err.expected))
        return FormulaSyntaxError(f"unexpected {str(err.token)!r} (expected {expected})", err.token.start_pos)
    # el token de fin toma la posicion del ultimo token; el error esta en el final del texto
    return FormulaSyntaxError("unexpected end of input", len(text))


def parse(text: str) -> Formula:
    """
    Descripción
        FUNCIÓN: Convierte texto en un AST de formula.

    Excepciones
        - FormulaSyntaxError: con `position` (offset de caracter) del error.
    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as err:
        raise _syntax_error(text, err) from None
    try:
        return FormulaBuilder().transform(tree)
    except VisitError as err:
        if isinstance(err.orig_exc, SitawareError):
            raise err.orig_exc from None
        raise
