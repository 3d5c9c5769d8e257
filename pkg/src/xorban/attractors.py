"""Attractors (terminal SCCs), orbits and convergence profiles."""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DETERMINISTIC, DETERMINISTIC_CAP, TransitionGraph, UpdateSchedule, schedule_map
from .errors import CapacityError, DomainError
from .netcore import Configuration, Network, code_to_bitstring

STABLE = "stable-configuration"
LIMIT_CYCLE = "limit-cycle"
OSCILLATION = "stable-oscillation"


@dataclass(frozen=True)
class Attractor:
    n: int
    members: tuple[int, ...]
    kind: str
    basin_size: int | None = None

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def period(self) -> int | None:
        if self.kind == OSCILLATION:
            return None
        return len(self.members)

    def bitstrings(self) -> list[str]:
        return [code_to_bitstring(c, self.n) for c in self.members]


def tarjan_sccs(adjacency: list[list[int]]) -> list[list[int]]:
    """Strongly connected components, iteratively (no recursion limit)."""
    size = len(adjacency)
    index = [-1] * size
    low = [0] * size
    on_stack = [False] * size
    stack: list[int] = []
    sccs = []
    counter = 0
    for root in range(size):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            nbrs = adjacency[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                w = nbrs[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def _basin_labels(succ: np.ndarray, attractors: list[Attractor]) -> np.ndarray:
    label = np.full(len(succ), -1, dtype=np.int64)
    for k, a in enumerate(attractors):
        label[list(a.members)] = k
    succ_l = succ.tolist()
    lab = label.tolist()
    for c in range(len(succ_l)):
        path = []
        v = c
        while lab[v] == -1:
            path.append(v)
            v = succ_l[v]
        for w in path:
            lab[w] = lab[v]
    return np.asarray(lab, dtype=np.int64)


def find_attractors(g: TransitionGraph) -> list[Attractor]:
    """Terminal SCCs of ``g``, ordered by smallest member code."""
    adj = g.adjacency
    comps = tarjan_sccs(adj)
    comp_of = [0] * g.size
    for k, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = k
    terminal = []
    for k, comp in enumerate(comps):
        if all(comp_of[w] == k for v in comp for w in adj[v]):
            terminal.append(sorted(comp))
    terminal.sort(key=lambda m: m[0])
    out = []
    for members in terminal:
        if len(members) == 1:
            kind = STABLE
        elif g.mode == DETERMINISTIC:
            kind = LIMIT_CYCLE
        else:
            kind = OSCILLATION
        out.append(Attractor(g.n, tuple(members), kind))
    if g.mode == DETERMINISTIC:
        labels = _basin_labels(g.succ[0], out)
        counts = np.bincount(labels, minlength=len(out))
        out = [Attractor(a.n, a.members, a.kind, int(counts[k])) for k, a in enumerate(out)]
    return out


def recurrent_configurations(g: TransitionGraph) -> frozenset[int]:
    return frozenset(c for a in find_attractors(g) for c in a.members)


# -- orbits ------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSummary:
    start: Configuration
    transient: int
    period: int
    cycle: tuple[Configuration, ...] = field(repr=False)


def brent(f, x0):
    """Brent's cycle detection: returns (transient, period) of ``x0`` under ``f``."""
    power = lam = 1
    tortoise = x0
    hare = f(x0)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
    # synchronised walk, hare kept lam steps ahead
    tortoise = hare = x0
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        tortoise = f(tortoise)
        hare = f(hare)
        mu += 1
    return mu, lam


def _schedule_step(N: Network, u: UpdateSchedule):
    masks = u.masks()

    def step(code):
        for m in masks:
            code = N.update_code(code, m)
        return code

    return step


def orbit(N: Network, u: UpdateSchedule, x: Configuration) -> OrbitSummary:
    if x.n != N.n:
        raise DomainError(f"configuration size {x.n} != network size {N.n}")
    u.check(N.n)
    step = _schedule_step(N, u)
    mu, lam = brent(step, x.code)
    c = x.code
    for _ in range(mu):
        c = step(c)
    cycle = []
    for _ in range(lam):
        cycle.append(Configuration.from_code(c, N.n))
        c = step(c)
    return OrbitSummary(x, mu, lam, tuple(cycle))


def functional_orbits(succ) -> tuple[np.ndarray, np.ndarray]:
    """Transient and period of every code of a successor array, in O(2^n)."""
    succ_l = succ.tolist() if isinstance(succ, np.ndarray) else list(succ)
    size = len(succ_l)
    trans = [-1] * size
    per = [0] * size
    pos_on_path = {}
    for c in range(size):
        if trans[c] != -1:
            continue
        path = []
        pos_on_path.clear()
        v = c
        while trans[v] == -1 and v not in pos_on_path:
            pos_on_path[v] = len(path)
            path.append(v)
            v = succ_l[v]
        if trans[v] == -1:
            start = pos_on_path[v]
            cyc = path[start:]
            for w in cyc:
                trans[w] = 0
                per[w] = len(cyc)
            path = path[:start]
            t0, p0 = 0, len(cyc)
        else:
            t0, p0 = trans[v], per[v]
        for k, w in enumerate(reversed(path), start=1):
            trans[w] = t0 + k
            per[w] = p0
    return np.asarray(trans, dtype=np.int64), np.asarray(per, dtype=np.int64)


def scc_orbit_table(g: TransitionGraph) -> tuple[np.ndarray, np.ndarray]:
    """Transient/period of every start derived from the terminal SCCs of ``g``."""
    if g.mode != DETERMINISTIC:
        raise DomainError("orbit tables need a deterministic graph")
    atts = find_attractors(g)
    succ = g.succ[0]
    trans = np.full(g.size, -1, dtype=np.int64)
    period = np.zeros(g.size, dtype=np.int64)
    preds = [[] for _ in range(g.size)]
    for c, d in enumerate(succ.tolist()):
        preds[d].append(c)
    queue = deque()
    for a in atts:
        for c in a.members:
            trans[c] = 0
            period[c] = a.size
            queue.append(c)
    while queue:
        v = queue.popleft()
        for w in preds[v]:
            if trans[w] == -1:
                trans[w] = trans[v] + 1
                period[w] = period[v]
                queue.append(w)
    return trans, period


@dataclass(frozen=True)
class ConvergenceProfile:
    n: int
    t_star: int
    p_star: int
    census: dict[int, int]
    max_witness: int
    unit_transient: int
    density_attains_max: bool
    periods_divide: bool


def convergence_profile(N: Network, u: UpdateSchedule) -> ConvergenceProfile:
    if N.n > DETERMINISTIC_CAP:
        raise CapacityError("convergence profile", N.n, DETERMINISTIC_CAP)
    succ = schedule_map(N, u)
    trans, per = functional_orbits(succ)
    t_star = int(trans.max())
    units = [1 << i for i in range(N.n)]
    p_star = int(per[1])
    census = dict(sorted(Counter(per.tolist()).items()))
    return ConvergenceProfile(
        n=N.n,
        t_star=t_star,
        p_star=p_star,
        census=census,
        max_witness=int(np.argmax(trans)),
        unit_transient=int(trans[1]),
        density_attains_max=any(int(trans[c]) == t_star for c in units),
        periods_divide=all(p_star % p == 0 for p in census),
    )


# -- reports -----------------------------------------------------------------


def attractor_report_text(atts: list[Attractor], mode: str) -> str:
    lines = [f"mode: {mode}", f"attractors: {len(atts)}"]
    for k, a in enumerate(atts):
        head = f"[{k}] {a.kind} size={a.size}"
        if a.period is not None and a.kind == LIMIT_CYCLE:
            head += f" period={a.period}"
        if a.basin_size is not None:
            head += f" basin={a.basin_size}"
        lines.append(head)
        lines.append("    " + " ".join(a.bitstrings()))
    return "\n".join(lines) + "\n"


def attractor_report_json(atts: list[Attractor], mode: str) -> str:
    data = {
        "mode": mode,
        "attractors": [
            {
                "kind": a.kind,
                "size": a.size,
                "period": a.period if a.kind != OSCILLATION else None,
                "members": a.bitstrings(),
                **({"basin_size": a.basin_size} if a.basin_size is not None else {}),
            }
            for a in atts
        ],
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
