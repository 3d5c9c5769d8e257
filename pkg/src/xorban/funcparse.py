"""The ``.ban`` text format, canonical printing and monotonicity analysis.

Format::

    # comment
    n=2
    0: x0 ^ x1
    1: !(x0 xor x1)

Operators, tightest first: NOT (``!``/``not``), AND (``&``/``and``),
XOR (``^``/``xor``), OR (``|``/``or``). Keywords are case-insensitive.
A file may instead hold a single ``circulant n=<n> coeffs=<j1,j2,...>`` line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import OutOfRangeError, ParseError
from .netcore import ENUMERATION_CAP, LocalFunction, Network, code_to_bitstring

# -- expression trees -------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # 'and' | 'xor' | 'or'
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Not, BinOp]


def evaluate(expr: Expr, n: int) -> np.ndarray:
    """Truth table of ``expr`` over all 2^n configurations (uint8 array)."""
    codes = np.arange(1 << n, dtype=np.int64)

    def ev(e):
        if isinstance(e, Const):
            return np.full(1 << n, e.value, dtype=np.uint8)
        if isinstance(e, Var):
            return ((codes >> e.index) & 1).astype(np.uint8)
        if isinstance(e, Not):
            return ev(e.operand) ^ 1
        a, b = ev(e.left), ev(e.right)
        if e.op == "and":
            return a & b
        if e.op == "or":
            return a | b
        return a ^ b

    return ev(expr)


def variables(expr: Expr) -> set[int]:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Not):
        return variables(expr.operand)
    return variables(expr.left) | variables(expr.right)


def syntactic_polarity(expr: Expr) -> dict[int, set[int]]:
    """Map each variable to the set of signs (+1, -1) it occurs with.

    Both operands of a XOR are counted with both signs, since
    ``a ^ b == (a & !b) | (!a & b)``.
    """
    out: dict[int, set[int]] = {}

    def walk(e, signs):
        if isinstance(e, Var):
            out.setdefault(e.index, set()).update(signs)
        elif isinstance(e, Not):
            walk(e.operand, {-s for s in signs})
        elif isinstance(e, BinOp):
            inner = signs if e.op != "xor" else {1, -1}
            walk(e.left, inner)
            walk(e.right, inner)

    walk(expr, {1})
    return out


# -- tokenizer and recursive-descent parser -----------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<var>[xX]\d+)|(?P<num>\d+)|(?P<word>[A-Za-z_]\w*)|(?P<sym>[!&|^()]))")
_WORDS = {"not": "!", "and": "&", "or": "|", "xor": "^"}


def _tokenize(text, line, col0):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        col = col0 + m.start(m.lastgroup) + 1
        if m.group("var"):
            tokens.append(("var", int(m.group("var")[1:]), col))
        elif m.group("num") is not None:
            value = m.group("num")
            if value not in ("0", "1"):
                raise ParseError(f"constant must be 0 or 1, got {value}", line, col)
            tokens.append(("const", int(value), col))
        elif m.group("word"):
            word = m.group("word").lower()
            if word not in _WORDS:
                raise ParseError(f"unknown keyword {m.group('word')!r}", line, col)
            tokens.append((_WORDS[word], None, col))
        else:
            tokens.append((m.group("sym"), None, col))
        pos = m.end()
    tokens.append(("eof", None, col0 + len(text) + 1))
    return tokens


class _Parser:
    # precedence climbing by grammar level: or < xor < and < not
    _LEVELS = (("|", "or"), ("^", "xor"), ("&", "and"))

    def __init__(self, tokens, n, line):
        self.tokens = tokens
        self.pos = 0
        self.n = n
        self.line = line

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self):
        expr = self.binary(0)
        kind, _, col = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {kind!r}", self.line, col)
        return expr

    def binary(self, level):
        if level == len(self._LEVELS):
            return self.unary()
        sym, name = self._LEVELS[level]
        left = self.binary(level + 1)
        while self.peek()[0] == sym:
            self.take()
            left = BinOp(name, left, self.binary(level + 1))
        return left

    def unary(self):
        kind, value, col = self.take()
        if kind == "!":
            return Not(self.unary())
        if kind == "var":
            if value >= self.n:
                raise ParseError(f"variable index out of range: x{value} with n={self.n}", self.line, col)
            return Var(value)
        if kind == "const":
            return Const(value)
        if kind == "(":
            inner = self.binary(0)
            kind, _, col = self.take()
            if kind != ")":
                raise ParseError("expected ')'", self.line, col)
            return inner
        what = "end of line" if kind == "eof" else repr(kind)
        raise ParseError(f"unexpected {what}", self.line, col)


def parse_expression(text: str, n: int, line: int | None = None, col0: int = 0) -> Expr:
    return _Parser(_tokenize(text, line, col0), n, line).parse()


@dataclass(frozen=True)
class NetworkSource:
    """Parsed ``.ban`` file before tabulation."""

    n: int
    lines: dict[int, Expr]

    def to_network(self) -> Network:
        return Network(tuple(LocalFunction(self.n, evaluate(self.lines[i], self.n).tobytes())
                             for i in range(self.n)))


_HEADER = re.compile(r"^\s*n\s*=\s*(\S*)\s*$")
_LINE = re.compile(r"^\s*(\d+)\s*:(.*)$")


def parse_source(text: str) -> NetworkSource:
    n = None
    lines: dict[int, Expr] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if n is None:
            m = _HEADER.match(raw)
            if not m:
                raise ParseError("expected header 'n=<int>'", lineno, 1)
            if not m.group(1).isdigit() or int(m.group(1)) < 1:
                raise ParseError(f"n must be a positive integer, got {m.group(1)!r}", lineno)
            n = int(m.group(1))
            if n > ENUMERATION_CAP:
                raise ParseError(f"n={n} exceeds cap {ENUMERATION_CAP}", lineno)
            continue
        m = _LINE.match(raw)
        if not m:
            raise ParseError("expected '<index>: <expression>'", lineno, 1)
        idx = int(m.group(1))
        if idx >= n:
            raise ParseError(f"automaton index {idx} out of range for n={n}", lineno, 1)
        if idx in lines:
            raise ParseError(f"duplicate definition of automaton {idx}", lineno, 1)
        lines[idx] = parse_expression(m.group(2), n, lineno, m.start(2))
    if n is None:
        raise ParseError("missing header 'n=<int>'")
    missing = [i for i in range(n) if i not in lines]
    if missing:
        raise ParseError(f"undefined automaton {missing[0]}")
    return NetworkSource(n, lines)


def parse_network(text: str) -> Network:
    return parse_source(text).to_network()


def load_network(text: str) -> Network:
    """Accept either ``.ban`` text or a one-line circulant spec."""
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if body and body[0].strip().lower().startswith("circulant"):
        from .xorcirculant import CirculantSpec, make_circulant_network

        if len(body) != 1:
            raise ParseError("a circulant spec file holds exactly one spec line")
        return make_circulant_network(CirculantSpec.parse(body[0]))
    return parse_network(text)


# -- canonical printing -------------------------------------------------------


def anf_monomials(table: bytes, n: int) -> list[int]:
    """Algebraic normal form (XOR of ANDs) as a list of variable masks."""
    a = np.frombuffer(table, dtype=np.uint8).copy()
    for j in range(n):
        step = 1 << j
        a = a.reshape(-1, 2 * step)
        a[:, step:] ^= a[:, :step]
        a = a.reshape(-1)
    return [int(m) for m in np.nonzero(a)[0]]


def _monomial_text(mask):
    if mask == 0:
        return "1"
    return " & ".join(f"x{i}" for i in range(mask.bit_length()) if mask >> i & 1)


def format_function(f: LocalFunction) -> str:
    monos = anf_monomials(f.table, f.n)
    if not monos:
        return "0"
    # 1 ^ xj prints as the literal !xj
    if len(monos) == 2 and monos[0] == 0 and monos[1] & (monos[1] - 1) == 0:
        return f"!x{monos[1].bit_length() - 1}"
    return " ^ ".join(_monomial_text(m) for m in sorted(monos, key=lambda m: (bin(m).count("1"), m)))


def format_network(N: Network) -> str:
    lines = [f"n={N.n}"]
    lines += [f"{i}: {format_function(f)}" for i, f in enumerate(N.functions)]
    return "\n".join(lines) + "\n"


# -- monotonicity -------------------------------------------------------------

INCREASING = "increasing"
DECREASING = "decreasing"
INDEPENDENT = "independent"
NON_MONOTONE = "non-monotone"


@dataclass(frozen=True)
class LocalMonotonicity:
    kind: str
    # codes u, v with bit j = 0: f(u) > f(u^j) and f(v) < f(v^j); set only when non-monotone
    witness: tuple[int, int] | None = None


def _classify(values: np.ndarray, j: int, n: int) -> LocalMonotonicity:
    low = np.nonzero((np.arange(1 << n) >> j & 1) == 0)[0]
    f0 = values[low]
    f1 = values[low | (1 << j)]
    dec = np.nonzero(f0 > f1)[0]
    inc = np.nonzero(f0 < f1)[0]
    if len(dec) and len(inc):
        return LocalMonotonicity(NON_MONOTONE, (int(low[dec[0]]), int(low[inc[0]])))
    if len(dec):
        return LocalMonotonicity(DECREASING)
    if len(inc):
        return LocalMonotonicity(INCREASING)
    return LocalMonotonicity(INDEPENDENT)


def local_monotonicity(f: LocalFunction, j: int) -> LocalMonotonicity:
    if not 0 <= j < f.n:
        raise OutOfRangeError(f"automaton index {j} out of range for n={f.n}")
    return _classify(f.values, j, f.n)


@dataclass(frozen=True)
class MonotonicityReport:
    n: int
    classes: dict[tuple[int, int], str]
    witnesses: dict[tuple[int, int], tuple[int, int]]

    @property
    def monotone(self) -> bool:
        return not self.witnesses

    @property
    def verdict(self) -> str:
        return "monotone" if self.monotone else "non-monotone"

    def violations(self) -> list[tuple[int, int]]:
        return sorted(self.witnesses)

    def render(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        for (i, j), (u, v) in sorted(self.witnesses.items()):
            lines.append(f"  f{i} non-monotone in x{j}: "
                         f"{code_to_bitstring(u, self.n)} decreases, {code_to_bitstring(v, self.n)} increases")
        return "\n".join(lines)


def network_monotone(N: Network) -> MonotonicityReport:
    classes = {}
    witnesses = {}
    for i, f in enumerate(N.functions):
        for j in range(N.n):
            lm = _classify(f.values, j, N.n)
            classes[(i, j)] = lm.kind
            if lm.witness is not None:
                witnesses[(i, j)] = lm.witness
    return MonotonicityReport(N.n, classes, witnesses)
