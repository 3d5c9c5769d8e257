"""Mechanical verification suites behind ``verify all``.

Each claim is a zero-argument function returning a ``ClaimResult``; all
randomness comes from ``random.Random`` seeded per claim, so output is
byte-identical across runs and worker counts.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor

from .attractors import convergence_profile, orbit, scc_orbit_table
from .dynamics import (
    ASYNCHRONOUS,
    GENERAL,
    DETERMINISTIC,
    UpdateSchedule,
    build_transition_graph,
    recurrent_set,
    sensitivity_scan,
)
from .funcparse import format_network, network_monotone, parse_network
from .netcore import Configuration, LocalFunction, Network
from .xorcirculant import (
    ClaimResult,
    CirculantSpec,
    check_power_step_identity,
    check_half_size_projection,
    check_interaction_graph,
    check_symmetry,
    circulant_count,
    enumerate_circulants,
    from_interaction_step,
    rot,
    step_code,
    symmetric_network,
    _mirror_code,
    _steps_to_zero,
)


def random_spec(rng: random.Random, n_max: int = 64, n_min: int = 2, k: int | None = None) -> CirculantSpec:
    n = rng.randint(n_min, n_max)
    kk = k if k is not None else rng.randint(2, n)
    rest = rng.sample(range(n - 1), kk - 1)
    return CirculantSpec(n, frozenset([n - 1, *rest]))


def random_network(rng: random.Random, n: int) -> Network:
    size = 1 << n
    return Network(tuple(LocalFunction(n, bytes(rng.getrandbits(1) for _ in range(size))) for _ in range(n)))


def random_block_schedule(rng: random.Random, n: int) -> UpdateSchedule:
    """A random ordered partition of the automata."""
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1))) if n > 1 else []
    blocks = []
    prev = 0
    for c in cuts + [n]:
        blocks.append(frozenset(order[prev:c]))
        prev = c
    return UpdateSchedule(tuple(blocks))


def xor_family():
    x = bytes([0, 1, 1, 0])
    nx = bytes([1, 0, 0, 1])
    return [Network((LocalFunction(2, a), LocalFunction(2, b))) for a in (x, nx) for b in (x, nx)]


# -- claims -------------------------------------------------------------------


def claim_p1_sensitivity():
    found = sensitivity_scan(2)
    nets = [N for N, _ in found]
    non_mono = all(not network_monotone(N).monotone for N in nets)
    family = all(F in nets for F in xor_family())
    both_xor = xor_family()[0]
    ra = recurrent_set(build_transition_graph(both_xor, ASYNCHRONOUS))
    rg = recurrent_set(build_transition_graph(both_xor, GENERAL))
    sets_ok = ra == {0, 1, 2, 3} and rg == {0}
    ok = non_mono and family and sets_ok
    return ClaimResult("P1-sensitivity", ok,
                       f"scanned=256 sensitive={len(nets)} all_non_monotone={non_mono} "
                       f"xor_family_present={family} recurrent_sets_ok={sets_ok}")


def claim_p21_count():
    bad = [(n, k) for n in range(2, 13) for k in range(2, n + 1)
           if len(enumerate_circulants(n, k)) != circulant_count(n, k)]
    return ClaimResult("P2.1-count", not bad, "2<=k<=n<=12" + (f" failing={bad}" if bad else ""))


def claim_p22_p23():
    rng = random.Random(2023)
    bad = []
    for _ in range(50):
        spec = random_spec(rng)
        full = (1 << spec.n) - 1
        ones = step_code(spec, full)
        expect = 0 if spec.k % 2 == 0 else full
        if step_code(spec, 0) != 0 or ones != expect:
            bad.append(str(spec))
    return ClaimResult("P2.2-P2.3-fixed", not bad, "specs=50 n<=64" + (f" failing={bad[:3]}" if bad else ""))


def claim_p24_rotation():
    checks = 0
    for n in range(2, 11):
        for spec in enumerate_circulants(n, 2):
            for code in range(1 << n):
                img = step_code(spec, code)
                for r in range(n):
                    checks += 1
                    if step_code(spec, rot(code, r, n)) != rot(img, r, n):
                        return ClaimResult("P2.4-rotation", False, f"{spec} seed={code} r={r}")
    return ClaimResult("P2.4-rotation", True, f"2-XOR n<=10 exhaustive checks={checks}")


def _mask_codes_all(spec, T):
    sym = symmetric_network(spec)
    out = []
    for i in range(spec.n):
        code = 1 << i
        row = [code]
        for _ in range(T):
            code = step_code(sym, code)
            row.append(code)
        out.append(row)
    return out


def _masks_agree(spec, seeds, T):
    masks = _mask_codes_all(spec, T)
    for x0 in seeds:
        x = x0
        for t in range(T + 1):
            for i in range(spec.n):
                if (x >> i & 1) != bin(x0 & masks[i][t]).count("1") & 1:
                    return (x0, i, t)
            x = step_code(spec, x)
    return None


def claim_l1_mask():
    checks = 0
    for n in range(2, 9):
        for spec in enumerate_circulants(n, 2):
            bad = _masks_agree(spec, range(1 << n), 2 * n)
            checks += 1 << n
            if bad:
                return ClaimResult("L1-mask", False, f"{spec} seed,i,t={bad}")
    rng = random.Random(64)
    spec = from_interaction_step(64, 4)
    seeds = [rng.getrandbits(64) for _ in range(1000)]
    bad = _masks_agree(spec, seeds, 128)
    if bad:
        return ClaimResult("L1-mask", False, f"{spec} seed,i,t={bad}")
    return ClaimResult("L1-mask", True, f"exhaustive 2-XOR n<=8 seeds={checks} t<=2n; random n=64 seeds=1000 t<=128")


def claim_l2_mirror():
    checks = 0
    for n in range(2, 9):
        for k in range(2, n + 1):
            for spec in enumerate_circulants(n, k):
                sym = symmetric_network(spec)
                for i in range(n):
                    for code in range(1 << n):
                        checks += 1
                        if step_code(sym, _mirror_code(code, i, n)) != _mirror_code(step_code(spec, code), i, n):
                            return ClaimResult("L2-mirror", False, f"{spec} i={i} seed={code}")
    return ClaimResult("L2-mirror", True, f"all canonical specs n<=8 exhaustive checks={checks}")


def claim_p3_symmetry():
    rng = random.Random(3)
    for _ in range(20):
        spec = random_spec(rng)
        for i in range(spec.n):
            res = check_symmetry(spec, i, 4 * spec.n)
            if not res:
                return ClaimResult("P3-symmetry", False, f"{spec} i={i} t={res.first_violation}")
    return ClaimResult("P3-symmetry", True, "specs=20 n<=64 all i T=4n")


def claim_p4_density():
    from .xorcirculant import make_circulant

    count = 0
    for n in range(2, 13):
        for spec in enumerate_circulants(n, 2):
            prof = convergence_profile(make_circulant(spec), UpdateSchedule.parallel(n))
            count += 1
            if not (prof.density_attains_max and prof.periods_divide):
                return ClaimResult("P4-density", False, f"{spec} t*={prof.t_star} p*={prof.p_star}")
    return ClaimResult("P4-density", True, f"2-XOR n<=12 specs={count} exhaustive")


def claim_t1_p6():
    lines = []
    ok_t1 = ok_p6 = True
    for n in (2, 4, 8, 16):
        spec = from_interaction_step(n, 0)
        for c in range(1 << n):
            t = _steps_to_zero(spec, c, n)
            if t is None:
                ok_t1 = False
                lines.append(f"n={n} seed={c} T1")
                break
            if bin(c).count("1") % 2 and t != n:
                ok_p6 = False
                lines.append(f"n={n} seed={c} P6 steps={t}")
                break
    detail = "n in {2,4,8,16} s=0 exhaustive" + (" " + ";".join(lines) if lines else "")
    return [ClaimResult("T1-power2", ok_t1, detail), ClaimResult("P6-odd", ok_p6, detail)]


def claim_p5_repeated():
    for n in (4, 8, 16):
        alt = sum(1 << i for i in range(1, n, 2))
        full = (1 << n) - 1
        for s in [0] + list(range(2, n)):
            spec = from_interaction_step(n, s)
            for c in (0, full, alt, alt ^ full):
                if _steps_to_zero(spec, c, 2) is None:
                    return ClaimResult("P5-repeated", False, f"n={n} s={s} seed={c}")
    return ClaimResult("P5-repeated", True, "n in {4,8,16} every s, 4 configurations each")


def claim_l4_repeated():
    ok, detail = check_half_size_projection(4, horizon=32, exhaustive_cap=8)
    return ClaimResult("L4-repeated", ok, detail)


def claim_l3_local():
    rng = random.Random(33)
    details = []
    for n in range(2, 21):
        seeds = range(1 << n) if n <= 10 else [rng.getrandbits(n) for _ in range(200)]
        ok, detail = check_power_step_identity(n, seeds)
        if not ok:
            return ClaimResult("L3-local", False, detail)
        details.append(n)
    return ClaimResult("L3-local", True, "s=0 n in 2..20 (any n, not only powers of two) exhaustive n<=10")


def claim_oracle():
    rng = random.Random(10)
    starts = 0
    for _ in range(20):
        n = rng.randint(1, 10)
        N = random_network(rng, n)
        for u in (UpdateSchedule.parallel(n), random_block_schedule(rng, n), random_block_schedule(rng, n)):
            g = build_transition_graph(N, DETERMINISTIC, u)
            trans, per = scc_orbit_table(g)
            for c in range(1 << n):
                o = orbit(N, u, Configuration.from_code(c, n))
                starts += 1
                if (o.transient, o.period) != (int(trans[c]), int(per[c])):
                    return ClaimResult("ORACLE-scc-brent", False, f"n={n} u={u} start={c}")
    return ClaimResult("ORACLE-scc-brent", True, f"networks=20 schedules=3 starts={starts}")


def claim_parse_roundtrip():
    count = 0
    for t0 in range(16):
        for t1 in range(16):
            N = Network.from_tables([[t0 >> c & 1 for c in range(4)], [t1 >> c & 1 for c in range(4)]])
            if not _roundtrip(N):
                return ClaimResult("PARSE-roundtrip", False, f"size-2 tables=({t0},{t1})")
            count += 1
    rng = random.Random(6)
    for _ in range(50):
        N = random_network(rng, rng.randint(1, 6))
        if not _roundtrip(N):
            return ClaimResult("PARSE-roundtrip", False, f"random n={N.n}")
        count += 1
    return ClaimResult("PARSE-roundtrip", True, f"networks={count}")


def _roundtrip(N):
    once = parse_network(format_network(N))
    twice = parse_network(format_network(once))
    return once == N and twice == once


def claim_interaction_graph():
    for n in range(2, 9):
        for k in range(2, n + 1):
            for spec in enumerate_circulants(n, k):
                if not check_interaction_graph(spec):
                    return ClaimResult("NET-interaction", False, str(spec))
    return ClaimResult("NET-interaction", True, "all canonical specs n<=8")


CLAIMS = (
    claim_p1_sensitivity,
    claim_p21_count,
    claim_p22_p23,
    claim_p24_rotation,
    claim_l1_mask,
    claim_l2_mirror,
    claim_p3_symmetry,
    claim_p4_density,
    claim_t1_p6,
    claim_p5_repeated,
    claim_l4_repeated,
    claim_l3_local,
    claim_oracle,
    claim_parse_roundtrip,
    claim_interaction_graph,
)


def _run(idx):
    res = CLAIMS[idx]()
    return res if isinstance(res, list) else [res]


def run_all(jobs: int = 1) -> list[ClaimResult]:
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            groups = list(ex.map(_run, range(len(CLAIMS))))
    else:
        groups = [_run(i) for i in range(len(CLAIMS))]
    return [r for g in groups for r in g]
