"""Update functions, schedules and transition graphs.

Three updating modes are supported: ``general`` (every non-empty update set),
``asynchronous`` (singleton update sets) and ``deterministic`` (the graph of
``F[u]`` for a block-sequential schedule ``u``).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, OutOfRangeError, ParseError
from .netcore import (
    ENUMERATION_CAP,
    Configuration,
    LocalFunction,
    Network,
    code_to_bitstring,
    indices_of,
    mask_of,
)

GENERAL = "general"
ASYNCHRONOUS = "asynchronous"
DETERMINISTIC = "deterministic"

GENERAL_CAP = 10
ASYNCHRONOUS_CAP = 16
DETERMINISTIC_CAP = ENUMERATION_CAP
SCAN_CAP = 3


@dataclass(frozen=True)
class UpdateSchedule:
    """Ordered blocks ``W_0, ..., W_{p-1}``; ``F[u]`` applies them left to right."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        for b in blocks:
            if not b:
                raise DomainError("schedule blocks must be non-empty")
            if min(b) < 0:
                raise OutOfRangeError(f"negative automaton index in block {sorted(b)}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def parallel(cls, n: int) -> UpdateSchedule:
        return cls((frozenset(range(n)),))

    @classmethod
    def sequential(cls, n: int) -> UpdateSchedule:
        return cls(tuple(frozenset({i}) for i in range(n)))

    @classmethod
    def parse(cls, text: str, n: int) -> UpdateSchedule:
        """Read ``{0}{1,2}``, ``parallel`` or ``sequential``."""
        t = text.strip()
        if t.lower() == "parallel":
            return cls.parallel(n)
        if t.lower() == "sequential":
            return cls.sequential(n)
        if not re.fullmatch(r"(\s*\{\s*\d+(\s*,\s*\d+)*\s*\}\s*)*", t):
            raise ParseError(f"malformed schedule {text!r}; expected e.g. '{{0}}{{1,2}}'")
        blocks = [frozenset(int(v) for v in body.split(","))
                  for body in re.findall(r"\{([^}]*)\}", t)]
        u = cls(tuple(blocks))
        u.check(n)
        return u

    def check(self, n: int) -> None:
        for b in self.blocks:
            if max(b) >= n:
                raise OutOfRangeError(f"automaton index {max(b)} out of range for n={n}")

    def masks(self) -> list[int]:
        return [sum(1 << i for i in b) for b in self.blocks]

    def __str__(self):
        return "".join("{" + ",".join(map(str, sorted(b))) + "}" for b in self.blocks)


def _update_set(W, n):
    W = frozenset(W)
    if not W:
        raise DomainError("update set W must be non-empty")
    return mask_of(W, n)


def apply_update(N: Network, x: Configuration, W: Iterable[int]) -> Configuration:
    """``F_W(x)``: every automaton of W reads the pre-update configuration."""
    if x.n != N.n:
        raise DomainError(f"configuration size {x.n} != network size {N.n}")
    return Configuration.from_code(N.update_code(x.code, _update_set(W, N.n)), N.n)


def apply_schedule(N: Network, u: UpdateSchedule, x: Configuration) -> Configuration:
    if x.n != N.n:
        raise DomainError(f"configuration size {x.n} != network size {N.n}")
    u.check(N.n)
    code = x.code
    for m in u.masks():
        code = N.update_code(code, m)
    return Configuration.from_code(code, N.n)


def schedule_map(N: Network, u: UpdateSchedule) -> np.ndarray:
    """Successor array of ``F[u]`` over all 2^n codes."""
    if N.n > DETERMINISTIC_CAP:
        raise CapacityError("deterministic transition graph", N.n, DETERMINISTIC_CAP)
    u.check(N.n)
    succ = np.arange(1 << N.n, dtype=np.int64)
    for m in u.masks():
        succ = N.update_map(m)[succ]
    return succ


@dataclass(frozen=True, eq=False)
class TransitionGraph:
    """Full transition structure of a network under one updating mode.

    ``labels`` holds the update-set bitmask of each transition family and
    ``succ[k, c]`` the image of code ``c`` under ``F_{labels[k]}``. In
    deterministic mode there is one unlabeled family, ``F[u]``.
    """

    n: int
    mode: str
    labels: tuple[int, ...]
    succ: np.ndarray
    schedule: UpdateSchedule | None = None

    @property
    def size(self) -> int:
        return 1 << self.n

    def transitions(self, code: int) -> list[tuple[frozenset[int] | None, int]]:
        if self.mode == DETERMINISTIC:
            return [(None, int(self.succ[0, code]))]
        return [(frozenset(indices_of(m)), int(self.succ[k, code])) for k, m in enumerate(self.labels)]

    def out_degree(self, code: int) -> int:
        return len(self.labels)

    def edge_count(self) -> int:
        return len(self.labels) * self.size

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Distinct successors of each code, ascending."""
        arr = np.sort(self.succ.T, axis=1)
        out = []
        for row in arr.tolist():
            dedup = []
            for v in row:
                if not dedup or dedup[-1] != v:
                    dedup.append(v)
            out.append(dedup)
        return out

    def successor(self, code: int) -> int:
        if self.mode != DETERMINISTIC:
            raise DomainError("successor() is only defined for deterministic graphs")
        return int(self.succ[0, code])


def build_transition_graph(N: Network, mode: str = GENERAL, schedule: UpdateSchedule | None = None) -> TransitionGraph:
    n = N.n
    if mode == GENERAL:
        if n > GENERAL_CAP:
            raise CapacityError("general transition graph", n, GENERAL_CAP)
        labels = tuple(range(1, 1 << n))
    elif mode == ASYNCHRONOUS:
        if n > ASYNCHRONOUS_CAP:
            raise CapacityError("asynchronous transition graph", n, ASYNCHRONOUS_CAP)
        labels = tuple(1 << i for i in range(n))
    elif mode == DETERMINISTIC:
        if schedule is None:
            schedule = UpdateSchedule.parallel(n)
        succ = schedule_map(N, schedule)
        return TransitionGraph(n, mode, (), succ.reshape(1, -1), schedule)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    succ = np.stack([N.update_map(m) for m in labels])
    return TransitionGraph(n, mode, labels, succ)


# -- sequentialisability -------------------------------------------------------


@dataclass(frozen=True)
class Sequentialisation:
    """Outcome of a sequentialisability query.

    ``path`` lists configurations from ``x`` to ``F_W(x)`` and ``updates[k]``
    is the automaton updated between ``path[k]`` and ``path[k+1]``.
    """

    sequentialisable: bool
    target: Configuration
    path: tuple[Configuration, ...] = ()
    updates: tuple[int, ...] = ()

    def __bool__(self):
        return self.sequentialisable


def _async_bfs(N, start, target):
    """Shortest asynchronous path as (codes, automata) or None."""
    if start == target:
        return [start], []
    prev = {start: None}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        nexts = sorted((N.update_code(c, 1 << i), i) for i in range(N.n))
        for d, i in nexts:
            if d in prev:
                continue
            prev[d] = (c, i)
            if d == target:
                codes, autos = [d], []
                while prev[d] is not None:
                    d, i = prev[d]
                    codes.append(d)
                    autos.append(i)
                return codes[::-1], autos[::-1]
            queue.append(d)
    return None


def is_sequentialisable(N: Network, x: Configuration, W: Iterable[int]) -> Sequentialisation:
    wmask = _update_set(W, N.n)
    target = N.update_code(x.code, wmask)
    tconf = Configuration.from_code(target, N.n)
    if wmask & (wmask - 1) == 0:
        i = wmask.bit_length() - 1
        return Sequentialisation(True, tconf, (x, tconf), (i,))
    found = _async_bfs(N, x.code, target)
    if found is None:
        return Sequentialisation(False, tconf)
    codes, autos = found
    return Sequentialisation(True, tconf, tuple(Configuration.from_code(c, N.n) for c in codes), tuple(autos))


def recurrent_set(g: TransitionGraph) -> frozenset[int]:
    from .attractors import find_attractors

    return frozenset(c for a in find_attractors(g) for c in a.members)


@dataclass(frozen=True)
class SensitivityEvidence:
    x: int
    W: frozenset[int]
    image: int
    async_recurrent: frozenset[int]
    general_recurrent: frozenset[int]


def _async_closure(succ_async: np.ndarray) -> list[int]:
    """Reachability bitsets (reflexive) over the asynchronous graph."""
    size = succ_async.shape[1]
    adj = [set(succ_async[:, c].tolist()) for c in range(size)]
    reach = []
    for c in range(size):
        seen = 1 << c
        stack = [c]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen >> w & 1:
                    seen |= 1 << w
                    stack.append(w)
        reach.append(seen)
    return reach


ESCAPE = "escape"
DIFFER = "differ"


def network_sensitivity(N: Network, criterion: str = ESCAPE) -> SensitivityEvidence | None:
    """Evidence that N is synchronism-sensitive, or None.

    Sensitive means: some synchronous transition cannot be reproduced by
    asynchronous steps, and the limit behaviours differ. With ``escape``
    (default) some configuration recurrent under the asynchronous mode must
    lose recurrence under the general mode; with ``differ`` it is enough that
    the two recurrent sets are unequal.
    """
    if criterion not in (ESCAPE, DIFFER):
        raise DomainError(f"unknown sensitivity criterion {criterion!r}")
    g = build_transition_graph(N, GENERAL)
    singles = [k for k, m in enumerate(g.labels) if m & (m - 1) == 0]
    reach = _async_closure(g.succ[singles])
    offending = None
    for c in range(g.size):
        for k, m in enumerate(g.labels):
            if m & (m - 1) == 0:
                continue
            d = int(g.succ[k, c])
            if not reach[c] >> d & 1:
                offending = (c, m, d)
                break
        if offending:
            break
    if offending is None:
        return None
    a = build_transition_graph(N, ASYNCHRONOUS)
    rec_a = recurrent_set(a)
    rec_g = recurrent_set(g)
    if rec_a == rec_g or (criterion == ESCAPE and rec_a <= rec_g):
        return None
    c, m, d = offending
    return SensitivityEvidence(c, frozenset(indices_of(m)), d, rec_a, rec_g)


def _scan_chunk(args):
    n, first_tables, criterion = args
    size = 1 << n
    all_tables = [bytes((t >> c) & 1 for c in range(size)) for t in range(1 << size)]
    found = []
    for head in first_tables:
        for rest in product(range(1 << size), repeat=n - 1):
            idx = (head,) + rest
            N = Network(tuple(LocalFunction(n, all_tables[t]) for t in idx))
            ev = network_sensitivity(N, criterion)
            if ev is not None:
                found.append((idx, ev))
    return found


def sensitivity_scan(n: int, jobs: int = 1, criterion: str = ESCAPE) -> list[tuple[Network, SensitivityEvidence]]:
    """Enumerate every size-n network and keep the synchronism-sensitive ones.

    Networks are enumerated by their truth tables read as integers (bit c of
    the integer is f(c)), in lexicographic order of (f_0, ..., f_{n-1}).
    """
    if n < 1:
        raise DomainError("network size must be >= 1")
    if n > SCAN_CAP:
        raise CapacityError("sensitivity scan", n, SCAN_CAP)
    heads = list(range(1 << (1 << n)))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [(n, heads[k::jobs], criterion) for k in range(jobs)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = [r for part in ex.map(_scan_chunk, chunks) for r in part]
        parts.sort(key=lambda r: r[0])
    else:
        parts = _scan_chunk((n, heads, criterion))
    size = 1 << n
    return [(Network(tuple(LocalFunction(n, bytes((t >> c) & 1 for c in range(size))) for t in idx)), ev)
            for idx, ev in parts]


# -- DOT export ---------------------------------------------------------------


def _label_text(mask):
    return "{" + ",".join(map(str, indices_of(mask))) + "}"


def to_dot(g: TransitionGraph, highlight: Iterable[int] = ()) -> str:
    """Graphviz rendering; parallel labelled edges are merged into one arc."""
    hl = set(highlight)
    lines = [f'digraph "{g.mode}" {{']
    if g.schedule is not None:
        lines.append(f'  label="{g.mode} {g.schedule}";')
    for c in range(g.size):
        attrs = ' style=filled fillcolor=grey' if c in hl else ""
        lines.append(f'  "{code_to_bitstring(c, g.n)}" [shape=box{attrs}];')
    for c in range(g.size):
        src = code_to_bitstring(c, g.n)
        if g.mode == DETERMINISTIC:
            lines.append(f'  "{src}" -> "{code_to_bitstring(int(g.succ[0, c]), g.n)}";')
            continue
        grouped: dict[int, list[int]] = {}
        for k, m in enumerate(g.labels):
            grouped.setdefault(int(g.succ[k, c]), []).append(m)
        for d in sorted(grouped):
            label = ", ".join(_label_text(m) for m in grouped[d])
            lines.append(f'  "{src}" -> "{code_to_bitstring(d, g.n)}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def network_from_functions(functions: Sequence) -> Network:
    """Build a network from callables taking a Configuration."""
    n = len(functions)
    return Network(tuple(LocalFunction.from_callable(n, fn) for fn in functions))
