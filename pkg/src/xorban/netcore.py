"""Configurations, local transition functions, networks and interaction graphs.

A configuration of ``n`` automata is encoded as the integer
``enc(x) = sum(x[i] << i)``: automaton 0 is the least-significant bit.
Truth tables, successor arrays and every file format use that encoding.
Bitstrings shown to users print automaton 0 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import OutOfRangeError, StructuralError

#: Largest n for which {0,1}^n is ever enumerated (truth tables, state graphs).
ENUMERATION_CAP = 24
#: Largest n for table-free circulant simulation.
SIMULATION_CAP = 4096


def _check_index(i, n, what="automaton index"):
    if not 0 <= i < n:
        raise OutOfRangeError(f"{what} {i} out of range for n={n}")


def mask_of(indices: Iterable[int], n: int) -> int:
    m = 0
    for i in indices:
        _check_index(i, n)
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def code_to_bitstring(code: int, n: int) -> str:
    return "".join("1" if code >> i & 1 else "0" for i in range(n))


def bitstring_to_code(text: str) -> int:
    code = 0
    for i, ch in enumerate(text):
        if ch == "1":
            code |= 1 << i
        elif ch != "0":
            raise StructuralError(f"bad bit {ch!r} in bitstring {text!r}")
    return code


@dataclass(frozen=True)
class Configuration:
    """State of all ``n`` automata; ``bits[i]`` is automaton ``i``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not 1 <= len(bits) <= SIMULATION_CAP:
            raise StructuralError(f"configuration length {len(bits)} outside 1..{SIMULATION_CAP}")
        if any(b not in (0, 1) for b in bits):
            raise StructuralError("configuration bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @cached_property
    def code(self) -> int:
        c = 0
        for i, b in enumerate(self.bits):
            if b:
                c |= 1 << i
        return c

    @classmethod
    def from_code(cls, code: int, n: int) -> Configuration:
        if code < 0 or code >> n:
            raise StructuralError(f"code {code} does not fit in {n} bits")
        return cls(tuple(code >> i & 1 for i in range(n)))

    @classmethod
    def from_string(cls, text: str) -> Configuration:
        """Parse a bitstring written with automaton 0 leftmost."""
        text = text.strip()
        if not text or any(ch not in "01" for ch in text):
            raise StructuralError(f"not a bitstring: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def zeros(cls, n: int) -> Configuration:
        return cls((0,) * n)

    @classmethod
    def unit(cls, i: int, n: int) -> Configuration:
        """The configuration with only automaton ``i`` in state 1."""
        _check_index(i, n)
        return cls(tuple(1 if j == i else 0 for j in range(n)))

    def __getitem__(self, i):
        return self.bits[i]

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))

    def weight(self) -> int:
        return sum(self.bits)


def flip(x: Configuration, W: Iterable[int]) -> Configuration:
    """Negate the bits of ``x`` listed in ``W``."""
    W = set(W)
    for i in W:
        _check_index(i, x.n)
    return Configuration(tuple(b ^ 1 if i in W else b for i, b in enumerate(x.bits)))


def density(x: Configuration) -> Fraction:
    return Fraction(x.weight(), x.n)


def rotate(x: Configuration, r: int) -> Configuration:
    """Cyclic shift: the result ``y`` has ``y[(i + r) % n] == x[i]``."""
    n = x.n
    r %= n
    if r == 0:
        return x
    return Configuration(x.bits[n - r:] + x.bits[:n - r])


def symmetric_conf(x: Configuration, i: int) -> Configuration:
    """Mirror of ``x`` around automaton ``i``: ``y[j] = x[(2i - j) % n]``."""
    n = x.n
    _check_index(i, n)
    return Configuration(tuple(x.bits[(2 * i - j) % n] for j in range(n)))


def _table_array(table) -> np.ndarray:
    return np.frombuffer(table, dtype=np.uint8)


def _support_from_table(table: bytes, n: int) -> frozenset[int]:
    t = _table_array(table)
    codes = np.arange(len(t), dtype=np.int64)
    support = set()
    for j in range(n):
        if np.any(t != t[codes ^ (1 << j)]):
            support.add(j)
    return frozenset(support)


@dataclass(frozen=True)
class LocalFunction:
    """Boolean function on {0,1}^n stored as a full truth table.

    ``table[enc(x)]`` is ``f(x)``. ``support`` is derived from the table and
    holds the automata on which ``f`` effectively depends.
    """

    n: int
    table: bytes
    support: frozenset[int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= ENUMERATION_CAP:
            raise StructuralError(f"arity {self.n} outside 1..{ENUMERATION_CAP}")
        table = bytes(self.table)
        if len(table) != 1 << self.n:
            raise StructuralError(
                f"truth table length {len(table)} does not match arity {self.n} (expected {1 << self.n})")
        if any(b > 1 for b in table):
            raise StructuralError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "support", _support_from_table(table, self.n))

    @classmethod
    def from_callable(cls, n: int, fn) -> LocalFunction:
        """Tabulate ``fn`` (taking a Configuration) over all 2^n inputs."""
        return cls(n, bytes(int(bool(fn(Configuration.from_code(c, n)))) for c in range(1 << n)))

    @classmethod
    def constant(cls, n: int, value: int) -> LocalFunction:
        return cls(n, bytes([value & 1]) * (1 << n))

    @classmethod
    def xor_of(cls, n: int, indices: Iterable[int]) -> LocalFunction:
        m = mask_of(indices, n)
        codes = np.arange(1 << n, dtype=np.int64) & m
        parity = np.zeros(1 << n, dtype=np.uint8)
        while m:
            parity ^= (codes & 1).astype(np.uint8)
            codes >>= 1
            m >>= 1
        return cls(n, parity.tobytes())

    def __call__(self, x) -> int:
        code = x.code if isinstance(x, Configuration) else x
        return self.table[code]

    @property
    def values(self) -> np.ndarray:
        return _table_array(self.table)


def support_of(f: LocalFunction) -> frozenset[int]:
    return _support_from_table(f.table, f.n)


@dataclass(frozen=True)
class Network:
    """A Boolean automata network given by its ``n`` local functions."""

    functions: tuple[LocalFunction, ...]

    def __post_init__(self):
        functions = tuple(self.functions)
        if not functions:
            raise StructuralError("a network needs at least one automaton")
        n = len(functions)
        for i, f in enumerate(functions):
            if f.n != n:
                raise StructuralError(f"local function {i} has arity {f.n}, network size is {n}")
        object.__setattr__(self, "functions", functions)

    @property
    def n(self) -> int:
        return len(self.functions)

    @classmethod
    def from_tables(cls, tables: Sequence[Sequence[int]]) -> Network:
        n = len(tables)
        return cls(tuple(LocalFunction(n, bytes(t)) for t in tables))

    @cached_property
    def table_matrix(self) -> np.ndarray:
        """Array of shape (n, 2^n); row i is the truth table of f_i."""
        return np.stack([f.values for f in self.functions])

    def update_code(self, code: int, wmask: int) -> int:
        """F_W on a single encoded configuration (W given as a bitmask)."""
        out = code & ~wmask
        i = 0
        m = wmask
        while m:
            if m & 1 and self.functions[i].table[code]:
                out |= 1 << i
            m >>= 1
            i += 1
        return out

    def update_map(self, wmask: int) -> np.ndarray:
        """F_W over every configuration at once, as an int64 successor array."""
        codes = np.arange(1 << self.n, dtype=np.int64)
        out = codes & ~wmask
        tm = self.table_matrix
        for i in indices_of(wmask):
            out |= tm[i].astype(np.int64) << i
        return out


@dataclass(frozen=True)
class InteractionGraph:
    n: int
    arcs: frozenset[tuple[int, int]]

    def in_neighbours(self, i: int) -> frozenset[int]:
        return frozenset(j for j, k in self.arcs if k == i)

    def out_neighbours(self, j: int) -> frozenset[int]:
        return frozenset(i for k, i in self.arcs if k == j)


def interaction_graph(N: Network) -> InteractionGraph:
    """Arc ``(j, i)`` whenever ``j`` effectively influences ``f_i``."""
    return InteractionGraph(N.n, frozenset((j, i) for i, f in enumerate(N.functions) for j in f.support))
