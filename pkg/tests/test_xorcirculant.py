import random
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorban.dynamics import apply_update
from xorban.errors import DomainError, ParseError
from xorban.netcore import Configuration, interaction_graph, rotate, symmetric_conf
from xorban.verify import random_spec
from xorban.xorcirculant import (
    CirculantSpec,
    check_symmetry,
    circuit_decomposition,
    enumerate_circulants,
    eval_via_masks,
    from_interaction_step,
    interaction_step,
    make_circulant,
    make_circulant_network,
    mask_table,
    parallel_step,
    repetition_degree,
    space_time,
    symmetric_network,
    verify_power_two_suite,
)

from conftest import conf, gf2_matrix, matrix_iterate, matrix_step


def spec(n, *coeffs):
    return CirculantSpec(n, frozenset(coeffs))


def test_make_circulant_matches_matrix_definition():
    N = make_circulant(spec(4, 3, 0))
    C = gf2_matrix(4, {3, 0})
    for code in range(16):
        x = Configuration.from_code(code, 4)
        expected = tuple(int(v) for v in C @ np.array(x.bits) % 2)
        assert tuple(f(x) for f in N.functions) == expected
        # f_i = x_{i-1} ^ x_i
        assert expected == tuple(x[(i - 1) % 4] ^ x[i] for i in range(4))


def test_size_two_circulant_is_both_xor(both_xor):
    assert make_circulant(spec(2, 1, 0)) == both_xor


def test_odd_k_all_ones_fixed():
    assert parallel_step(spec(5, 4, 0, 1), conf("11111")) == conf("11111")


def test_hamiltonian_circuit_in_interaction_graph():
    for n in range(2, 8):
        for s in enumerate_circulants(n, 2):
            arcs = interaction_graph(make_circulant(s)).arcs
            assert {(i, (i + 1) % n) for i in range(n)} <= arcs
            sym_arcs = interaction_graph(make_circulant_network(symmetric_network(s))).arcs
            assert {((i + 1) % n, i) for i in range(n)} <= sym_arcs


def test_make_circulant_errors():
    with pytest.raises(DomainError, match="not canonical"):
        make_circulant(spec(4, 1, 0))
    with pytest.raises(DomainError):
        make_circulant(spec(4, 3))


def test_enumerate_examples():
    assert len(enumerate_circulants(5, 2)) == 4
    assert enumerate_circulants(3, 2) == [spec(3, 2, 0), spec(3, 2, 1)]
    assert enumerate_circulants(4, 4) == [spec(4, 0, 1, 2, 3)]
    with pytest.raises(DomainError):
        enumerate_circulants(3, 4)


def test_enumerate_count_formula():
    for n in range(2, 13):
        for k in range(2, n + 1):
            specs = enumerate_circulants(n, k)
            assert len(specs) == comb(n - 1, k - 1)
            assert len(set(specs)) == len(specs)
            assert all(s.canonical and s.k == k for s in specs)


def test_symmetric_network():
    assert symmetric_network(spec(4, 3, 0)) == spec(4, 1, 0)
    assert symmetric_network(spec(2, 1, 0)) == spec(2, 1, 0)
    for n in range(2, 9):
        for s in enumerate_circulants(n, 2):
            assert symmetric_network(symmetric_network(s)) == s
            assert np.array_equal(gf2_matrix(n, symmetric_network(s).coeffs), gf2_matrix(n, s.coeffs).T)


def test_interaction_step_examples():
    assert interaction_step(spec(27, 26, 23)) == 4
    assert interaction_step(spec(4, 3, 0)) == 0
    assert interaction_step(spec(5, 4, 2)) == 3
    with pytest.raises(DomainError):
        interaction_step(spec(5, 4, 0, 1))


def test_interaction_step_arcs_and_never_one():
    for n in range(2, 13):
        for sp in enumerate_circulants(n, 2):
            s = interaction_step(sp)
            assert s != 1
            arcs = interaction_graph(make_circulant(sp)).arcs
            assert all((i, (i + s) % n) in arcs for i in range(n))
            assert from_interaction_step(n, s) == sp


def _count_cycles(n, offset):
    seen, cycles, lengths = set(), 0, set()
    for start in range(n):
        if start in seen:
            continue
        v, length = start, 0
        while v not in seen:
            seen.add(v)
            v = (v + offset) % n
            length += 1
        cycles += 1
        lengths.add(length)
    return cycles, lengths


def test_circuit_decomposition():
    assert circuit_decomposition(spec(27, 26, 23))[1] == (23, 1, 27)
    assert circuit_decomposition(spec(4, 3, 2))[1] == (2, 2, 2)
    assert circuit_decomposition(spec(4, 3, 0))[1] == (0, 4, 1)
    for n in range(2, 13):
        for j in range(n - 1):
            for m, count, length in circuit_decomposition(spec(n, n - 1, j)):
                assert (count, {length}) == _count_cycles(n, (n - m) % n)


def test_parallel_step_examples():
    assert parallel_step(spec(4, 3, 0), conf("1000")) == conf("1100")
    rng = random.Random(1)
    for _ in range(40):
        s = random_spec(rng)
        z = Configuration.zeros(s.n)
        assert parallel_step(s, z) == z
        ones = Configuration((1,) * s.n)
        assert parallel_step(s, ones) == (z if s.k % 2 == 0 else ones)


def test_parallel_step_matches_matrix_and_truth_table():
    rng = random.Random(2)
    for _ in range(40):
        s = random_spec(rng, n_max=10)
        N = make_circulant(s)
        for _ in range(20):
            x = Configuration.from_code(rng.randrange(1 << s.n), s.n)
            y = parallel_step(s, x)
            assert y.bits == matrix_step(s.n, s.coeffs, x.bits)
            assert y == apply_update(N, x, range(s.n))


def test_parallel_step_large_n():
    rng = random.Random(3)
    s = random_spec(rng, n_min=500, n_max=600, k=3)
    x = Configuration(tuple(rng.getrandbits(1) for _ in range(s.n)))
    assert parallel_step(s, x).bits == matrix_step(s.n, s.coeffs, x.bits)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 40).flatmap(lambda n: st.tuples(
    st.just(n),
    st.sets(st.integers(0, n - 2), min_size=1, max_size=n - 1),
    st.integers(0, (1 << n) - 1),
    st.integers(0, (1 << n) - 1),
    st.integers(-n, n),
)))
def test_linearity_and_rotation(data):
    n, rest, a, b, r = data
    s = CirculantSpec(n, frozenset(rest | {n - 1}))
    xa, xb = Configuration.from_code(a, n), Configuration.from_code(b, n)
    xab = Configuration.from_code(a ^ b, n)
    fa, fb = parallel_step(s, xa), parallel_step(s, xb)
    assert parallel_step(s, xab).code == fa.code ^ fb.code
    assert parallel_step(s, rotate(xa, r)) == rotate(fa, r)


def test_mirror_commutes_exhaustive_small():
    for n in range(2, 7):
        for k in range(2, n + 1):
            for s in enumerate_circulants(n, k):
                sym = symmetric_network(s)
                for code in range(1 << n):
                    x = Configuration.from_code(code, n)
                    for i in range(n):
                        assert parallel_step(sym, symmetric_conf(x, i)) == symmetric_conf(parallel_step(s, x), i)


def test_space_time_examples():
    d = space_time(spec(4, 3, 0), conf("1000"), 4)
    assert [str(c) for c in d.configurations()] == ["1000", "1100", "1010", "1111", "0000"]
    assert d.trace(1) == [0, 1, 0, 1, 0]
    d8 = space_time(from_interaction_step(8, 0), Configuration.unit(0, 8), 8)
    assert d8.rows[8] == 0
    assert space_time(spec(4, 3, 0), conf("1000"), 0).rows == (1,)
    with pytest.raises(DomainError):
        space_time(spec(4, 3, 0), conf("1000"), -1)


def test_space_time_exports():
    d = space_time(spec(4, 3, 0), conf("1000"), 4)
    assert d.to_text() == "#...\n##..\n#.#.\n####\n....\n"
    pbm = d.to_pbm().splitlines()
    assert pbm[:2] == ["P1", "4 5"]
    assert pbm[2] == "1 0 0 0" and pbm[-1] == "0 0 0 0"


def test_mask_table_examples():
    m = mask_table(spec(4, 3, 0), 0, 2)
    assert m.masks == (frozenset({0}), frozenset({0, 3}), frozenset({0, 2}))
    assert mask_table(spec(2, 1, 0), 0, 1).masks[1] == {0, 1}
    for i in range(5):
        assert mask_table(spec(5, 4, 2), i, 0).masks[0] == {i}


def test_masks_are_rows_of_matrix_powers():
    for n in range(2, 8):
        for s in enumerate_circulants(n, 2):
            C = gf2_matrix(n, s.coeffs)
            P = np.eye(n, dtype=np.int64)
            for t in range(2 * n + 1):
                for i in range(n):
                    assert mask_table(s, i, t).masks[t] == {j for j in range(n) if P[i, j]}
                P = P @ C % 2


def test_eval_via_masks_examples():
    s = spec(4, 3, 0)
    x0 = conf("1100")
    assert eval_via_masks(s, x0, 0, 2) == 1 == matrix_iterate(4, s.coeffs, x0.bits, 2)[0]
    assert all(eval_via_masks(s, x0, i, 0) == x0[i] for i in range(4))
    z = Configuration.zeros(4)
    assert all(eval_via_masks(s, z, i, t) == 0 for i in range(4) for t in range(6))


def test_eval_via_masks_matches_iteration_random():
    rng = random.Random(4)
    for _ in range(10):
        s = random_spec(rng, n_max=12)
        x0 = Configuration.from_code(rng.randrange(1 << s.n), s.n)
        for t in range(2 * s.n + 1):
            xt = matrix_iterate(s.n, s.coeffs, x0.bits, t)
            assert tuple(eval_via_masks(s, x0, i, t) for i in range(s.n)) == xt


def test_check_symmetry_examples():
    assert check_symmetry(from_interaction_step(14, 0), 3, 28)
    assert check_symmetry(spec(6, 5, 0, 2), 0, 64)
    for n in range(2, 6):
        for s in enumerate_circulants(n, 2):
            for i in range(n):
                assert check_symmetry(s, i, 0)


def test_masks_match_symmetry_lhs():
    """Masks are the supports of the mirrored-orbit iterates used by check_symmetry."""
    s = spec(9, 8, 3)
    sym = symmetric_network(s)
    for i in range(9):
        x = Configuration.unit(i, 9)
        table = mask_table(s, i, 18)
        for t in range(19):
            assert table.masks[t] == {j for j in range(9) if x[j]}
            x = parallel_step(sym, x)


@pytest.mark.parametrize("x, degree", [
    ("0101", 1), ("00000000", 3), ("1001", 0), ("101", 0), ("1", 0), ("11", 1),
])
def test_repetition_degree(x, degree):
    assert repetition_degree(conf(x)) == degree


def test_power_two_suite():
    rep = verify_power_two_suite(3)
    assert rep.passed
    assert [r.claim for r in rep.results] == ["L3-local", "P5-repeated", "T1-power2", "P6-odd", "L4-repeated"]
    bad = verify_power_two_suite(3, s=2)
    assert {r.claim: r.passed for r in bad.results} == {
        "L3-local": False, "P5-repeated": True, "T1-power2": False, "P6-odd": False, "L4-repeated": False}
    assert all("precondition" in r.detail for r in bad.results if not r.passed)
    assert verify_power_two_suite(1).passed


def test_power_two_small_examples():
    s2 = from_interaction_step(2, 0)
    assert [str(c) for c in space_time(s2, conf("10"), 2).configurations()] == ["10", "11", "00"]
    d = space_time(from_interaction_step(8, 2), conf("01010101"), 2)
    assert d.rows[2] == 0


def test_spec_text_round_trip():
    s = CirculantSpec.parse("circulant n=27 coeffs=26,23")
    assert s == spec(27, 26, 23) and str(s) == "circulant n=27 coeffs=26,23"
    assert str(spec(5, 1, 4, 0)) == "circulant n=5 coeffs=4,0,1"
    with pytest.raises(ParseError):
        CirculantSpec.parse("circulant n=4")
    with pytest.raises(ParseError):
        CirculantSpec.parse("circulant n=4 coeffs=3,3")
