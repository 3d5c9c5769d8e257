"""k-XOR circulant networks over GF(2).

A spec is the size ``n`` and the set of non-null first-row coefficients
``c_j`` of the circulant interaction matrix ``C[i][j] = c[(j - i) % n]``.
Automaton ``i`` then computes ``XOR_{m in coeffs} x[(i + m) % n]``, so a
coefficient ``m`` contributes arcs ``((i + m) % n, i)``, i.e. arcs of offset
``(n - m) % n``. Canonical specs contain ``n - 1`` (Hamiltonian circuit
``i -> i+1``).

Simulation works on packed integers (bit i = automaton i) and never builds
a truth table, so sizes up to ``SIMULATION_CAP`` are fine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb, gcd
from typing import Iterable

from .errors import DomainError, OutOfRangeError, ParseError
from .netcore import (
    ENUMERATION_CAP,
    SIMULATION_CAP,
    Configuration,
    LocalFunction,
    Network,
    interaction_graph,
)


@dataclass(frozen=True)
class CirculantSpec:
    n: int
    coeffs: frozenset[int]

    def __post_init__(self):
        coeffs = frozenset(int(j) for j in self.coeffs)
        if not 1 <= self.n <= SIMULATION_CAP:
            raise DomainError(f"circulant size {self.n} outside 1..{SIMULATION_CAP}")
        for j in coeffs:
            if not 0 <= j < self.n:
                raise OutOfRangeError(f"coefficient index {j} out of range for n={self.n}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def canonical(self) -> bool:
        return (self.n - 1) in self.coeffs

    def ordered_coeffs(self) -> list[int]:
        """``n-1`` first (when present), then the rest ascending."""
        rest = sorted(j for j in self.coeffs if j != self.n - 1)
        return ([self.n - 1] if self.canonical else []) + rest

    def matrix(self) -> list[list[int]]:
        return [[1 if (j - i) % self.n in self.coeffs else 0 for j in range(self.n)] for i in range(self.n)]

    def __str__(self):
        return f"circulant n={self.n} coeffs={','.join(map(str, self.ordered_coeffs()))}"

    @classmethod
    def parse(cls, text: str) -> CirculantSpec:
        m = re.fullmatch(r"\s*circulant\s+n\s*=\s*(\d+)\s+coeffs\s*=\s*(\d+(?:\s*,\s*\d+)*)\s*", text, re.I)
        if not m:
            raise ParseError(f"malformed circulant spec {text!r}; expected 'circulant n=<n> coeffs=<j1,j2,...>'")
        n = int(m.group(1))
        coeffs = [int(v) for v in m.group(2).split(",")]
        if len(set(coeffs)) != len(coeffs):
            raise ParseError(f"duplicate coefficient in {text!r}")
        return cls(n, frozenset(coeffs))


def _check_canonical(spec: CirculantSpec):
    if spec.k < 2 or spec.n < spec.k:
        raise DomainError(f"k-XOR circulant needs 2 <= k <= n, got k={spec.k}, n={spec.n}")
    if not spec.canonical:
        raise DomainError(f"spec {spec} is not canonical (coefficient n-1={spec.n - 1} missing); "
                          "use make_circulant_network for symmetric networks")


def make_circulant_network(spec: CirculantSpec) -> Network:
    """Relaxed constructor: any coefficient set, canonical or not."""
    if spec.n > ENUMERATION_CAP:
        raise DomainError(f"truth tables need n <= {ENUMERATION_CAP}; simulate with parallel_step instead")
    n = spec.n
    return Network(tuple(LocalFunction.xor_of(n, {(i + m) % n for m in spec.coeffs}) for i in range(n)))


def make_circulant(spec: CirculantSpec) -> Network:
    _check_canonical(spec)
    return make_circulant_network(spec)


def enumerate_circulants(n: int, k: int) -> list[CirculantSpec]:
    """All canonical k-XOR circulant specs of size n, lexicographic in the free coefficients."""
    if not 2 <= k <= n:
        raise DomainError(f"need 2 <= k <= n, got k={k}, n={n}")
    return [CirculantSpec(n, frozenset((n - 1,) + rest)) for rest in combinations(range(n - 1), k - 1)]


def circulant_count(n: int, k: int) -> int:
    return comb(n - 1, k - 1)


def symmetric_network(spec: CirculantSpec) -> CirculantSpec:
    """Spec of the network whose interaction matrix is the transpose."""
    return CirculantSpec(spec.n, frozenset((spec.n - j) % spec.n for j in spec.coeffs))


def interaction_step(spec: CirculantSpec) -> int:
    _check_canonical(spec)
    if spec.k != 2:
        raise DomainError(f"interaction step is only defined for k=2, got k={spec.k}")
    (m,) = spec.coeffs - {spec.n - 1}
    return (spec.n - m) % spec.n


def from_interaction_step(n: int, s: int) -> CirculantSpec:
    """Canonical 2-XOR spec of size n with interaction-step s (s != 1)."""
    if not 0 <= s < n or s == 1 or n < 2:
        raise DomainError(f"interaction step must be in 0..{n - 1} and != 1, got {s}")
    return CirculantSpec(n, frozenset({n - 1, (n - s) % n}))


def circuit_decomposition(spec: CirculantSpec) -> list[tuple[int, int, int]]:
    """(coefficient, number of circuits, circuit length) per coefficient; gcd(n, 0) = n."""
    out = []
    for j in spec.ordered_coeffs():
        g = gcd(spec.n, j)  # math.gcd(n, 0) == n
        out.append((j, g, spec.n // g))
    return out


def predicted_arcs(spec: CirculantSpec) -> frozenset[tuple[int, int]]:
    n = spec.n
    return frozenset(((i + m) % n, i) for i in range(n) for m in spec.coeffs)


# -- packed simulation --------------------------------------------------------


def rot(code: int, r: int, n: int) -> int:
    """Packed ``rotate``: bit i moves to bit (i + r) % n."""
    r %= n
    if r == 0:
        return code
    full = (1 << n) - 1
    return ((code << r) | (code >> (n - r))) & full


def step_code(spec: CirculantSpec, code: int) -> int:
    out = 0
    for m in spec.coeffs:
        out ^= rot(code, -m, spec.n)
    return out


def parallel_step(spec: CirculantSpec, x: Configuration) -> Configuration:
    if x.n != spec.n:
        raise DomainError(f"configuration size {x.n} != spec size {spec.n}")
    return Configuration.from_code(step_code(spec, x.code), spec.n)


def iterate_code(spec: CirculantSpec, code: int, t: int) -> int:
    for _ in range(t):
        code = step_code(spec, code)
    return code


@dataclass(frozen=True)
class SpaceTimeDiagram:
    n: int
    rows: tuple[int, ...]  # packed configurations, row index = time step

    def configurations(self) -> list[Configuration]:
        return [Configuration.from_code(r, self.n) for r in self.rows]

    def trace(self, i: int) -> list[int]:
        return [r >> i & 1 for r in self.rows]

    def to_text(self) -> str:
        return "".join("".join("#" if r >> i & 1 else "." for i in range(self.n)) + "\n" for r in self.rows)

    def to_pbm(self) -> str:
        lines = ["P1", f"{self.n} {len(self.rows)}"]
        lines += [" ".join(str(r >> i & 1) for i in range(self.n)) for r in self.rows]
        return "\n".join(lines) + "\n"


def space_time(spec: CirculantSpec, x0: Configuration, T: int) -> SpaceTimeDiagram:
    if T < 0:
        raise DomainError("horizon T must be >= 0")
    if x0.n != spec.n:
        raise DomainError(f"configuration size {x0.n} != spec size {spec.n}")
    rows = [x0.code]
    for _ in range(T):
        rows.append(step_code(spec, rows[-1]))
    return SpaceTimeDiagram(spec.n, tuple(rows))


def _set_of(code: int) -> frozenset[int]:
    out = []
    i = 0
    while code:
        if code & 1:
            out.append(i)
        code >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class MaskTable:
    i: int
    masks: tuple[frozenset[int], ...]

    def __getitem__(self, t):
        return self.masks[t]


def _mask_codes(spec, i, T):
    sym = symmetric_network(spec)
    code = 1 << i
    codes = [code]
    for _ in range(T):
        code = step_code(sym, code)
        codes.append(code)
    return codes


def mask_table(spec: CirculantSpec, i: int, T: int) -> MaskTable:
    """Sets of automata in state 1 along the symmetric network's orbit of the unit seed at i."""
    if not 0 <= i < spec.n:
        raise OutOfRangeError(f"automaton index {i} out of range for n={spec.n}")
    return MaskTable(i, tuple(_set_of(c) for c in _mask_codes(spec, i, T)))


def eval_via_masks(spec: CirculantSpec, x0: Configuration, i: int, t: int) -> int:
    """State of automaton i at time t, read off the initial configuration through its mask."""
    mask = mask_table(spec, i, t).masks[t]
    v = 0
    for j in mask:
        v ^= x0.bits[j]
    return v


def _mirror_code(code, i, n):
    out = 0
    for j in range(n):
        if code >> ((2 * i - j) % n) & 1:
            out |= 1 << j
    return out


@dataclass(frozen=True)
class SymmetryCheck:
    ok: bool
    first_violation: int | None = None

    def __bool__(self):
        return self.ok


def check_symmetry(spec: CirculantSpec, i: int, T: int) -> SymmetryCheck:
    """Check that the symmetric network's orbit of the unit seed mirrors the direct one around i."""
    if not 0 <= i < spec.n:
        raise OutOfRangeError(f"automaton index {i} out of range for n={spec.n}")
    sym = symmetric_network(spec)
    a = b = 1 << i
    for t in range(T + 1):
        if a != _mirror_code(b, i, spec.n):
            return SymmetryCheck(False, t)
        a = step_code(sym, a)
        b = step_code(spec, b)
    return SymmetryCheck(True)


def repetition_degree(x) -> int:
    bits = tuple(x.bits) if isinstance(x, Configuration) else tuple(x)
    degree = 0
    while len(bits) > 1 and len(bits) % 2 == 0:
        half = len(bits) // 2
        if bits[:half] != bits[half:]:
            break
        degree += 1
        bits = bits[:half]
    return degree


# -- power-of-two suite -------------------------------------------------------


@dataclass(frozen=True)
class ClaimResult:
    claim: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.claim} {self.detail}"


@dataclass(frozen=True)
class SuiteReport:
    results: tuple[ClaimResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def render(self) -> str:
        return "".join(r.line() + "\n" for r in self.results)


def _steps_to_zero(spec, code, limit):
    t = 0
    while code and t <= limit:
        code = step_code(spec, code)
        t += 1
    return t if code == 0 else None


def _seeds(n, exhaustive_cap, samples, rng):
    if n <= exhaustive_cap:
        return range(1 << n)
    return [rng.getrandbits(n) for _ in range(samples)]


def check_power_step_identity(n: int, seeds: Iterable[int]) -> tuple[bool, str]:
    """x_i(2^q) = x_{i-2^q}(0) ^ x_i(0) for every q with 2^q <= 2n, s = 0."""
    spec = from_interaction_step(n, 0)
    qmax = (2 * n).bit_length() - 1
    count = 0
    for code in seeds:
        x = code
        t = 0
        for q in range(qmax + 1):
            x = iterate_code(spec, x, (1 << q) - t)
            t = 1 << q
            if x != code ^ rot(code, 1 << q, n):
                return False, f"n={n} seed={code} q={q}"
            count += 1
    return True, f"n={n} checks={count}"


def verify_power_two_suite(p: int, s: int = 0, exhaustive_cap: int = 16, samples: int = 1000,
                           rng=None) -> SuiteReport:
    """Check the power-of-two convergence claims for the 2-XOR network of size 2^p.

    Claims that need interaction-step 0 are reported as precondition failures
    when ``s != 0``; the repeated-configuration claim holds for every s.
    """
    import random

    rng = rng or random.Random(0)
    results = []
    if p < 1:
        return SuiteReport((ClaimResult("suite", False, f"precondition: p={p} must be >= 1"),))
    n = 1 << p
    try:
        spec = from_interaction_step(n, s)
    except DomainError as exc:
        return SuiteReport((ClaimResult("suite", False, f"precondition: {exc}"),))
    seeds = list(_seeds(n, exhaustive_cap, samples, rng))
    scope = "exhaustive" if n <= exhaustive_cap else f"sampled {len(seeds)}"

    if s == 0:
        ok, detail = check_power_step_identity(n, seeds)
        results.append(ClaimResult("L3-local", ok, f"{detail} {scope}"))
    else:
        results.append(ClaimResult("L3-local", False, f"precondition: needs s=0, got s={s}"))

    alt = sum(1 << i for i in range(1, n, 2))
    four = [0, (1 << n) - 1, alt, alt ^ ((1 << n) - 1)]
    assert all(repetition_degree(Configuration.from_code(c, n)) >= p - 1 for c in four)
    bad = [c for c in four if _steps_to_zero(spec, c, 2) is None]
    results.append(ClaimResult("P5-repeated", not bad, f"n={n} s={s} configurations=4"
                               + (f" failing={bad}" if bad else "")))

    if s == 0:
        worst = 0
        odd_bad = None
        for c in seeds:
            t = _steps_to_zero(spec, c, n)
            if t is None:
                results.append(ClaimResult("T1-power2", False, f"n={n} seed={c} not zero within {n}"))
                break
            worst = max(worst, t)
            if bin(c).count("1") % 2 == 1 and t != n and odd_bad is None:
                odd_bad = (c, t)
        else:
            results.append(ClaimResult("T1-power2", True, f"n={n} max_steps={worst} {scope}"))
        results.append(ClaimResult("P6-odd", odd_bad is None,
                                   f"n={n} {scope}" + (f" seed={odd_bad[0]} steps={odd_bad[1]}" if odd_bad else "")))
        if p >= 2:
            ok, detail = check_half_size_projection(p, rng=rng, exhaustive_cap=exhaustive_cap // 2, samples=samples)
            results.append(ClaimResult("L4-repeated", ok, detail))
        else:
            results.append(ClaimResult("L4-repeated", True, "n=2 vacuous (half-size 1 is not a 2-XOR network)"))
    else:
        for claim in ("T1-power2", "P6-odd", "L4-repeated"):
            results.append(ClaimResult(claim, False, f"precondition: needs s=0, got s={s}"))
    return SuiteReport(tuple(results))


def check_half_size_projection(p: int, horizon: int | None = None, rng=None, exhaustive_cap: int = 8,
                 samples: int = 1000) -> tuple[bool, str]:
    """Repeated seeds (x', x') of size 2^p evolve as (x'(t), x'(t)) with x' in the half network."""
    import random

    n = 1 << p
    half = n // 2
    big = from_interaction_step(n, 0)
    small = from_interaction_step(half, 0)
    horizon = 2 * n if horizon is None else horizon
    halves = _seeds(half, exhaustive_cap, samples, rng or random.Random(0))
    count = 0
    for h in halves:
        x = h | (h << half)
        y = h
        for t in range(horizon + 1):
            if x != (y | (y << half)):
                return False, f"n={n} half-seed={h} t={t}"
            x = step_code(big, x)
            y = step_code(small, y)
        count += 1
    return True, f"n={n} half-seeds={count} t<={horizon}"


def check_interaction_graph(spec: CirculantSpec) -> bool:
    return interaction_graph(make_circulant_network(spec)).arcs == predicted_arcs(spec)
