"""
Line-oriented text format for automata and signaling agents.

::

    # comments run to the end of the line
    kind: state | operator | agent
    dim: 2
    symbol 0 ket 1 0                   # state kind
    symbol X matrix 0 1 ; 1 0          # operator and agent kinds
    state A                            # automata: order defines indices
    signal Exterior                    # agents: order defines indices
    initial A 1                        # agents: initial <signal>
    final B 1                          # agents: final <signal>
    corner Interior                    # agents: accepted bottom-right signals
    edge A B 1 1                       # automata: edge <from> <to> <symbol> <weight>
    trans Exterior Exterior X BoundaryWithX BoundaryWithX 1

Complex literals are ``a``, ``a+bi`` or ``a-bi`` with no inner whitespace.
Every name must be defined before it is used.  Errors are reported as
:class:`SpecError` with the 1-based line and column of the offending token.
"""
import re

from .automaton import OPERATOR, STATE, SymbolTable, WeightedAutomaton
from .complexfmt import format_complex, parse_complex
from .errors import SpecError
from .grid2d import SignalingAgent, Transition

__all__ = ["parse_spec", "dump_spec", "AGENT"]

AGENT = "agent"
DEFAULT_DIM = 2
_TOKEN = re.compile(r"\S+")


class _Line:
    def __init__(self, number, text):
        self.number = number
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]


class _Parser:
    def __init__(self, source):
        self.source = source
        self.kind = None
        self.dim = None
        self.symbols = {}
        self.symbol_order = []
        self.names = []  # states or signals, in order
        self.initial = {}
        self.final = {}
        self.corner = []
        self.edges = []
        self.transitions = []

    def error(self, message, line, col=1):
        return SpecError(message, line.number, col, self.source)

    def token(self, line, k, what):
        if k >= len(line.tokens):
            end = line.tokens[-1][1] + len(line.tokens[-1][0]) if line.tokens else 1
            raise self.error(f"expected {what}", line, end)
        return line.tokens[k]

    def number(self, line, k):
        text, col = self.token(line, k, "a complex number")
        try:
            return parse_complex(text)
        except ValueError:
            raise self.error(f"invalid complex literal {text!r}", line, col) from None

    def expect_end(self, line, k):
        if len(line.tokens) > k:
            text, col = line.tokens[k]
            raise self.error(f"unexpected token {text!r}", line, col)

    def need_kind(self, line, *kinds):
        if self.kind is None:
            raise self.error("'kind:' must come first", line)
        if self.kind not in kinds:
            word, col = line.tokens[0]
            raise self.error(f"'{word}' is not allowed in a {self.kind} spec", line, col)

    def name_ref(self, line, k, table, what):
        text, col = self.token(line, k, f"a {what} name")
        if text not in table:
            raise self.error(f"undefined {what} {text!r}", line, col)
        return text

    # one handler per directive
    def do_kind(self, line):
        if self.kind is not None:
            raise self.error("duplicate 'kind:'", line)
        text, col = self.token(line, 1, "state, operator or agent")
        if text not in (STATE, OPERATOR, AGENT):
            raise self.error(f"unknown kind {text!r}", line, col)
        self.kind = text
        self.expect_end(line, 2)

    def do_dim(self, line):
        self.need_kind(line, STATE, OPERATOR, AGENT)
        if self.dim is not None:
            raise self.error("duplicate 'dim:'", line)
        if self.symbols:
            raise self.error("'dim:' must precede every symbol", line)
        text, col = self.token(line, 1, "an integer")
        if not text.isdigit() or int(text) < 1:
            raise self.error(f"invalid dimension {text!r}", line, col)
        self.dim = int(text)
        self.expect_end(line, 2)

    def do_symbol(self, line):
        self.need_kind(line, STATE, OPERATOR, AGENT)
        name, col = self.token(line, 1, "a symbol name")
        if name in self.symbols:
            raise self.error(f"duplicate symbol {name!r}", line, col)
        form, fcol = self.token(line, 2, "'ket' or 'matrix'")
        d = self.dim or DEFAULT_DIM
        if self.kind == STATE:
            if form != "ket":
                raise self.error("state specs define symbols with 'ket'", line, fcol)
            values = [self.number(line, k) for k in range(3, len(line.tokens))]
            if len(values) != d:
                raise self.error(f"ket has {len(values)} entries, dimension is {d}", line, fcol)
            self.symbols[name] = values
        else:
            if form != "matrix":
                raise self.error(f"{self.kind} specs define symbols with 'matrix'", line, fcol)
            rows, current = [], []
            for k in range(3, len(line.tokens)):
                text, tcol = line.tokens[k]
                if text == ";":
                    rows.append(current)
                    current = []
                else:
                    current.append(self.number(line, k))
            rows.append(current)
            if len(rows) != d or any(len(r) != d for r in rows):
                shape = f"{len(rows)} rows of lengths {[len(r) for r in rows]}"
                raise self.error(f"matrix must be {d}x{d}, got {shape}", line, fcol)
            self.symbols[name] = rows
        self.symbol_order.append(name)

    def do_state(self, line):
        self._declare(line, (STATE, OPERATOR), "state")

    def do_signal(self, line):
        self._declare(line, (AGENT,), "signal")

    def _declare(self, line, kinds, what):
        self.need_kind(line, *kinds)
        name, col = self.token(line, 1, f"a {what} name")
        if name in self.names:
            raise self.error(f"duplicate {what} {name!r}", line, col)
        self.names.append(name)
        self.expect_end(line, 2)

    def _endpoint(self, line, table):
        what = "signal" if self.kind == AGENT else "state"
        name = self.name_ref(line, 1, self.names, what)
        if name in table:
            raise self.error(f"duplicate {line.tokens[0][0]} {name!r}", line, line.tokens[1][1])
        if self.kind == AGENT:
            table[name] = 1
            self.expect_end(line, 2)
        else:
            table[name] = self.number(line, 2)
            self.expect_end(line, 3)

    def do_initial(self, line):
        self.need_kind(line, STATE, OPERATOR, AGENT)
        if self.kind == AGENT and self.initial:
            raise self.error("an agent has exactly one initial signal", line)
        self._endpoint(line, self.initial)

    def do_final(self, line):
        self.need_kind(line, STATE, OPERATOR, AGENT)
        self._endpoint(line, self.final)

    def do_corner(self, line):
        self.need_kind(line, AGENT)
        name = self.name_ref(line, 1, self.names, "signal")
        if name in self.corner:
            raise self.error(f"duplicate corner {name!r}", line, line.tokens[1][1])
        self.corner.append(name)
        self.expect_end(line, 2)

    def do_edge(self, line):
        self.need_kind(line, STATE, OPERATOR)
        src = self.name_ref(line, 1, self.names, "state")
        dst = self.name_ref(line, 2, self.names, "state")
        sym = self.name_ref(line, 3, self.symbols, "symbol")
        self.edges.append((src, dst, sym, self.number(line, 4)))
        self.expect_end(line, 5)

    def do_trans(self, line):
        self.need_kind(line, AGENT)
        up = self.name_ref(line, 1, self.names, "signal")
        left = self.name_ref(line, 2, self.names, "signal")
        sym = self.name_ref(line, 3, self.symbols, "symbol")
        right = self.name_ref(line, 4, self.names, "signal")
        down = self.name_ref(line, 5, self.names, "signal")
        w = self.number(line, 6)
        if w == 0:
            raise self.error("transition weight must be nonzero", line, line.tokens[6][1])
        key = (up, left, sym, right, down)
        if any(key == (t.up, t.left, t.symbol, t.right, t.down) for t in self.transitions):
            raise self.error("duplicate transition", line)
        self.transitions.append(Transition(up, left, sym, right, down, w))
        self.expect_end(line, 7)

    DIRECTIVES = {
        "kind:": do_kind, "dim:": do_dim, "symbol": do_symbol, "state": do_state,
        "signal": do_signal, "initial": do_initial, "final": do_final, "corner": do_corner,
        "edge": do_edge, "trans": do_trans,
    }

    def parse(self, text):
        for number, raw in enumerate(text.splitlines(), start=1):
            line = _Line(number, raw.split("#", 1)[0])
            if not line.tokens:
                continue
            word, col = line.tokens[0]
            handler = self.DIRECTIVES.get(word)
            if handler is None:
                raise self.error(f"unknown directive {word!r}", line, col)
            handler(self, line)
        return self.build()

    def build(self):
        if self.kind is None:
            raise SpecError("missing 'kind:'", source=self.source)
        what = "signal" if self.kind == AGENT else "state"
        if not self.names:
            raise SpecError(f"no {what}s defined", source=self.source)
        if not self.symbols:
            raise SpecError("no symbols defined", source=self.source)
        if not self.initial:
            raise SpecError(f"no initial {what}", source=self.source)
        if not self.final:
            raise SpecError(f"no final {what}", source=self.source)
        if self.kind == STATE:
            table = SymbolTable.states(self.symbols)
        else:
            table = SymbolTable.operators(self.symbols)
        if self.kind == AGENT:
            return SignalingAgent(self.names, self.transitions, table,
                                  next(iter(self.initial)), set(self.final),
                                  corner_final_signals=set(self.corner) or None)
        return WeightedAutomaton.from_edges(
            self.names, self.edges, initial=self.initial, final=self.final,
            symbols=table, alphabet=tuple(self.symbol_order))


def parse_spec(text, source="<spec>"):
    """Parse spec text into a :class:`WeightedAutomaton` or :class:`SignalingAgent`."""
    return _Parser(source).parse(text)


def _fmt(z):
    return format_complex(z)


def _symbol_lines(table):
    out = []
    for name in table.names:
        value = table[name]
        if table.kind == STATE:
            out.append(f"symbol {name} ket " + " ".join(_fmt(v) for v in value))
        else:
            rows = [" ".join(_fmt(v) for v in row) for row in value]
            out.append(f"symbol {name} matrix " + " ; ".join(rows))
    return out


def dump_spec(obj):
    """Spec text that parses back to an equivalent object."""
    if isinstance(obj, SignalingAgent):
        lines = [f"kind: {AGENT}", f"dim: {obj.symbols.d}"]
        lines += _symbol_lines(obj.symbols)
        lines += [f"signal {s}" for s in obj.signal_names]
        lines.append(f"initial {obj.initial_signal}")
        lines += [f"final {s}" for s in obj.signal_names if s in obj.final_signals]
        if obj.corner_final_signals is not None:
            lines += [f"corner {s}" for s in obj.signal_names if s in obj.corner_final_signals]
        lines += [f"trans {t.up} {t.left} {t.symbol} {t.right} {t.down} {_fmt(t.weight)}"
                  for t in obj.transitions]
        return "\n".join(lines) + "\n"
    a = obj
    lines = [f"kind: {a.kind}", f"dim: {a.symbols.d}"]
    lines += _symbol_lines(SymbolTable(a.symbols.kind, a.symbols.d,
                                       {n: a.symbols[n] for n in a.alphabet}))
    lines += [f"state {q}" for q in a.states]
    lines += [f"initial {q} {_fmt(w)}" for q, w in zip(a.states, a.initial) if w != 0]
    lines += [f"final {q} {_fmt(w)}" for q, w in zip(a.states, a.final) if w != 0]
    lines += [f"edge {s} {t} {sym} {_fmt(w)}" for s, t, sym, w in a.edges()]
    return "\n".join(lines) + "\n"
