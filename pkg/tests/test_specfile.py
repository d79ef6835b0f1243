import itertools
from pathlib import Path

import numpy as np
import pytest

from automps.automaton import evaluate
from automps.errors import SpecError
from automps.grid2d import four_x_agent
from automps.library import corpus, transverse_field_ising
from automps.specfile import dump_spec, parse_spec

SPECS = Path(__file__).resolve().parent.parent / "specs"

W_SPEC = """\
kind: state
symbol 0 ket 1 0
symbol 1 ket 0 1
state A
state B
initial A 1
final B 1
edge A A 0 1
edge A B 1 1
edge B B 0 1
"""


def test_w_spec_evaluates():
    a = parse_spec(W_SPEC)
    assert a.kind == "state"
    assert a.symbols.d == 2
    assert evaluate(a, "0100") == 1
    assert evaluate(a, "0110") == 0
    assert evaluate(a, "0000") == 0


def test_shipped_w_spec_matches_inline():
    a = parse_spec((SPECS / "w.wfa").read_text())
    b = parse_spec(W_SPEC)
    for w in itertools.product("01", repeat=5):
        assert evaluate(a, w) == evaluate(b, w)


def test_shipped_ising_spec_matches_library():
    a = parse_spec((SPECS / "ising.wfa").read_text())
    b = transverse_field_ising(1.0)
    for w in itertools.product("IXZ", repeat=4):
        assert abs(evaluate(a, w) - evaluate(b, w)) < 1e-15


def test_agent_spec_equals_four_x_agent():
    agent = parse_spec((SPECS / "fourx.agent").read_text())
    ref = four_x_agent()
    assert agent.signal_names == ref.signal_names
    assert agent.transitions == ref.transitions
    assert agent.same_as(ref)


def _error(text):
    with pytest.raises(SpecError) as info:
        parse_spec(text, source="t.wfa")
    return info.value


def test_undefined_symbol_reported_at_edge():
    text = W_SPEC.replace("symbol 1 ket 0 1\n", "")
    err = _error(text)
    lines = text.splitlines()
    line = next(k for k, s in enumerate(lines, 1) if s.startswith("edge A B 1"))
    assert (err.line, err.col) == (line, 10)
    assert "undefined symbol" in err.message
    assert str(err).startswith(f"t.wfa:{line}:10")


@pytest.mark.parametrize("text,line,col,fragment", [
    ("kind: state\nsymbol 0 ket 1 0 0\n", 2, 10, "dimension is 2"),
    ("kind: state\nstate A\nstate A\n", 3, 7, "duplicate state"),
    ("kind: state\nfoo bar\n", 2, 1, "unknown directive"),
    ("state A\n", 1, 1, "must come first"),
    ("kind: weird\n", 1, 7, "unknown kind"),
    ("kind: operator\nsymbol X matrix 0 1 ; 1\n", 2, 10, "2x2"),
    ("kind: state\nsymbol 0 ket 1 0\nstate A\ninitial A 1+\n", 4, 11, "complex literal"),
    ("kind: state\nsymbol 0 ket 1 0\nstate A\nedge A A 0 1 extra\n", 4, 14, "unexpected token"),
    ("kind: state\nsymbol 0 ket 1 0\nstate A\nedge A B 0 1\n", 4, 8, "undefined state"),
    ("kind: agent\nsignal S\ntrans S S I S S 1\n", 3, 11, "undefined symbol"),
    ("kind: state\nsymbol 0 matrix 1 0 ; 0 1\n", 2, 10, "'ket'"),
])
def test_diagnostics_carry_location(text, line, col, fragment):
    err = _error(text)
    assert (err.line, err.col) == (line, col)
    assert fragment in err.message


def test_missing_sections_reported():
    assert "no final" in _error("kind: state\nsymbol 0 ket 1 0\nstate A\ninitial A 1\n").message
    assert "missing" in _error("# empty\n").message


def test_dimension_override():
    text = ("kind: state\ndim: 3\nsymbol a ket 1 0 0\nsymbol b ket 0 0 0+1i\n"
            "state A\ninitial A 1\nfinal A 2-1i\nedge A A a 1\nedge A A b 0.5\n")
    a = parse_spec(text)
    assert a.symbols.d == 3
    assert evaluate(a, "ab") == 0.5 * (2 - 1j)
    assert a.symbols["b"][2] == 1j


@pytest.mark.parametrize("name", sorted(corpus()))
def test_round_trip_preserves_outputs(name):
    a = corpus()[name]
    b = parse_spec(dump_spec(a))
    assert b.states == a.states and b.alphabet == a.alphabet
    for n in range(1, 7):
        for w in itertools.product(a.alphabet, repeat=n):
            assert evaluate(a, w) == evaluate(b, w)


def test_round_trip_complex_weights():
    a = parse_spec(W_SPEC.replace("edge A B 1 1", "edge A B 1 0.3-2.5i"))
    b = parse_spec(dump_spec(a))
    for w in itertools.product("01", repeat=6):
        assert evaluate(a, w) == evaluate(b, w)
    assert evaluate(b, "0100") == 0.3 - 2.5j


def test_agent_round_trip():
    for agent in (four_x_agent(), four_x_agent(reject_vacuum=False)):
        assert parse_spec(dump_spec(agent)).same_as(agent)


def test_symbol_values_parsed():
    a = parse_spec((SPECS / "ising.wfa").read_text())
    assert np.array_equal(a.symbols["Z"], np.diag([1, -1]))
