import itertools

import numpy as np
import pytest

from logic.formula import And, AtomicProp, Next, Not, Or, TrueF, Until
from logic.fts import FTS, GR1Spec
from logic.ltl import ltl_positions, ltl_satisfies
from logic.parser import parse
from logic.stl import Trace, stl_satisfies
from utils.errors import ConfigurationError, UnknownAtomError, UnsupportedFormulaError


WORD = [{"p"}, {"p"}, {"q"}]


def test_finite_word_semantics():
    assert ltl_satisfies(WORD, 0, parse("p U q"))
    assert not ltl_satisfies(WORD, 0, parse("G p"))
    assert ltl_satisfies(WORD, 0, parse("F q"))
    assert not ltl_satisfies(WORD, 2, parse("X q"))
    assert ltl_satisfies(WORD, 1, parse("X q"))
    assert not ltl_satisfies([{"p"}, {"p"}], 0, parse("p U q"))


def test_bounded_operators_count_steps():
    assert not ltl_satisfies(WORD, 0, parse("F[0,1] q"))
    assert ltl_satisfies(WORD, 1, parse("F[0,1] q"))
    assert ltl_satisfies(WORD, 0, parse("G[0,1] p"))
    assert ltl_satisfies(WORD, 0, parse("p U[0,2] q"))
    assert not ltl_satisfies(WORD, 0, parse("p U[0,1] q"))


def test_errors():
    with pytest.raises(UnknownAtomError):
        ltl_satisfies(WORD, 0, parse("r"), atoms={"p", "q"})
    with pytest.raises(UnsupportedFormulaError):
        ltl_satisfies(WORD, 0, parse("x1 >= 0"))
    with pytest.raises(ConfigurationError):
        ltl_satisfies([], 0, TrueF())
    with pytest.raises(ConfigurationError):
        ltl_satisfies(WORD, 3, TrueF())


# --------------------
# Comprobacion exhaustiva contra una definicion directa
# --------------------
LETTERS = [frozenset(s) for s in ((), ("p",), ("q",), ("p", "q"))]
UNARY = ("!", "X")
BINARY = ("&", "|", "U")
_BUILD = {"!": Not, "X": Next, "&": And, "|": Or, "U": Until}


def _words(length):
    return itertools.product(LETTERS, repeat=length)


def _formulas(depth):
    """Todas las formulas sobre p, q, !, X, &, |, U de profundidad <= depth, como tuplas."""
    if depth == 0:
        return ["p", "q"]
    below = _formulas(depth - 1)
    return (["p", "q"] + [(op, a) for op in UNARY for a in below]
            + [(op, a, b) for op in BINARY for a in below for b in below])


def _nth_formula(index, below):
    """Formula numero `index` del nivel siguiente a `below`, en el orden de `_formulas`."""
    m = len(below)
    if index < 2:
        return ("p", "q")[index]
    index -= 2
    if index < 2 * m:
        return UNARY[index // m], below[index % m]
    op, rest = divmod(index - 2 * m, m * m)
    a, b = divmod(rest, m)
    return BINARY[op], below[a], below[b]


def _to_formula(node):
    if isinstance(node, str):
        return AtomicProp(node)
    return _BUILD[node[0]](*(_to_formula(child) for child in node[1:]))


def _reference(node, labels, memo):
    """Tabla de verdad (palabra x posicion) de la definicion recursiva, todas las palabras a la vez."""
    if node in memo:
        return memo[node]
    if isinstance(node, str):
        table = labels[node]
    else:
        op, *children = node
        parts = [_reference(child, labels, memo) for child in children]
        if op == "!":
            table = ~parts[0]
        elif op == "&":
            table = parts[0] & parts[1]
        elif op == "|":
            table = parts[0] | parts[1]
        elif op == "X":
            table = np.zeros_like(parts[0])
            table[:, :-1] = parts[0][:, 1:]
        else:
            left, right = parts
            n = left.shape[1]
            table = np.zeros_like(left)
            # existe j >= k con right en j y left en k..j-1
            for k in range(n):
                for j in range(k, n):
                    table[:, k] |= right[:, j] & left[:, k:j].all(axis=1)
    memo[node] = table
    return table


def _labels(words):
    return {a: np.array([[a in letter for letter in w] for w in words], dtype=bool) for a in ("p", "q")}


def _check_every_position(nodes, max_length, evaluate):
    for length in range(1, max_length + 1):
        words = list(_words(length))
        labels, memo = _labels(words), {}
        for node in nodes:
            expected = _reference(node, labels, memo)
            formula = _to_formula(node)
            for row, word in enumerate(words):
                assert evaluate(word, formula) == expected[row].tolist(), (node, word)


def _by_position(word, formula):
    return [ltl_satisfies(word, k, formula) for k in range(len(word))]


def test_formula_enumeration_sizes():
    assert len(_formulas(1)) == 18
    below = _formulas(1)
    level = _formulas(2)
    assert len(level) == 2 + 2 * 18 + 3 * 18 ** 2
    assert [_nth_formula(i, below) for i in range(len(level))] == level


def test_depth_one_matches_reference_at_every_position():
    _check_every_position(_formulas(1), 4, _by_position)


def test_depth_two_matches_reference_on_short_words():
    _check_every_position(_formulas(2), 2, _by_position)


def test_positions_agree_with_single_queries():
    for word in _words(3):
        for node in _formulas(1):
            formula = _to_formula(node)
            assert ltl_positions(word, formula) == _by_position(word, formula)


@pytest.mark.slow
def test_depth_two_matches_reference_on_words_up_to_six():
    _check_every_position(_formulas(2), 6, ltl_positions)


@pytest.mark.slow
def test_sampled_depth_three_matches_reference_on_words_up_to_six():
    below = _formulas(2)
    total = 2 + 2 * len(below) + 3 * len(below) ** 2
    rng = np.random.default_rng(0)
    unary = 2 + 2 * len(below)
    picks = [*rng.choice(unary, size=40, replace=False), *(unary + rng.choice(total - unary, size=200, replace=False))]
    nodes = [_nth_formula(int(i), below) for i in picks]
    _check_every_position(nodes, 6, ltl_positions)


def _direct(word, k, text):
    n = len(word)
    at = lambda a, i: a in word[i]
    table = {
        "G p": lambda: all(at("p", i) for i in range(k, n)),
        "F q": lambda: any(at("q", i) for i in range(k, n)),
        "G (p | F q)": lambda: all(at("p", i) or any(at("q", j) for j in range(i, n)) for i in range(k, n)),
        "!(p & q) U p": lambda: any(at("p", j) and all(not (at("p", i) and at("q", i)) for i in range(k, j))
                                    for j in range(k, n)),
    }
    return table[text]()


DERIVED = ["G p", "F q", "G (p | F q)", "!(p & q) U p"]


def test_derived_operators_match_direct_definition():
    parsed = {text: parse(text) for text in DERIVED}
    for length in range(1, 6):
        for word in _words(length):
            for k in range(length):
                for text, formula in parsed.items():
                    assert ltl_satisfies(word, k, formula) == _direct(word, k, text), (word, k, text)


def test_labelled_trace_agrees_with_word_semantics():
    for word in _words(4):
        trace = Trace.uniform([[0.0]] * 4, labels=word)
        for text in ("p U q", "G p", "F q", "G (p | F q)"):
            assert stl_satisfies(trace, parse(text)) == ltl_satisfies(word, 0, parse(text))


# --------------------
# FTS y GR(1)
# --------------------
def _fts() -> FTS:
    return FTS(
        states=frozenset({"a", "b", "c"}),
        initial=frozenset({"a"}),
        transitions={"a": {"b"}, "b": {"c", "a"}, "c": {"c"}},
        observations=frozenset({"free", "busy"}),
        observation_map={"a": "free", "b": "busy", "c": "free"},
        labels={"a": {"home"}, "c": {"goal"}},
    )


def test_fts_runs_generate_words():
    fts = _fts()
    fts.validate()
    assert fts.alphabet == frozenset({"home", "goal"})
    word = fts.word_of(["a", "b", "c", "c"])
    assert word == [frozenset({"home"}), frozenset(), frozenset({"goal"}), frozenset({"goal"})]
    assert ltl_satisfies(word, 0, parse("home & F G goal"))
    with pytest.raises(ConfigurationError):
        fts.word_of(["a", "c"])
    with pytest.raises(ConfigurationError):
        fts.word_of(["b"])


def test_fts_validation():
    fts = _fts()
    fts.transitions = {"a": {"z"}}
    with pytest.raises(ConfigurationError):
        fts.validate()
    fts = _fts()
    fts.observation_map = {"a": "unknown"}
    with pytest.raises(ConfigurationError):
        fts.validate()
    fts = _fts()
    fts.initial = frozenset()
    with pytest.raises(ConfigurationError):
        fts.validate()


def test_gr1_assembly_and_validation():
    spec = GR1Spec(
        env_init=(parse("!req"),),
        env_safety=(parse("req | X !req"),),
        env_fairness=(parse("!req"),),
        sys_init=(parse("!grant"),),
        sys_safety=(parse("req | X !grant"),),
        sys_fairness=(parse("grant | !req"),),
    )
    f = spec.as_formula()
    assert f.atoms() == frozenset({"req", "grant"})
    # la asuncion falla en la posicion 0 (req aparece en la 1)
    assert ltl_satisfies([set(), {"req"}, {"req", "grant"}, set()], 0, f)
    assert GR1Spec().as_formula() == Or(Not(TrueF()), TrueF())


def test_gr1_rejects_out_of_fragment_formulas():
    with pytest.raises(ConfigurationError):
        GR1Spec(sys_safety=(parse("X X grant"),)).validate()
    with pytest.raises(ConfigurationError):
        GR1Spec(env_init=(parse("F req"),)).validate()
    with pytest.raises(ConfigurationError):
        GR1Spec(sys_fairness=(parse("G grant"),)).validate()
