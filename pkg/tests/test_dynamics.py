import random
from collections import deque

import pytest

from xorban.attractors import find_attractors
from xorban.dynamics import (
    ASYNCHRONOUS,
    DETERMINISTIC,
    GENERAL,
    UpdateSchedule,
    apply_schedule,
    apply_update,
    build_transition_graph,
    is_sequentialisable,
    network_sensitivity,
    recurrent_set,
    sensitivity_scan,
    to_dot,
)
from xorban.errors import CapacityError, DomainError, OutOfRangeError, ParseError
from xorban.funcparse import network_monotone
from xorban.netcore import Configuration, LocalFunction, Network
from xorban.verify import random_block_schedule, random_network, xor_family
from xorban.xorcirculant import CirculantSpec, make_circulant

from conftest import brute_update, conf, network_of


def all_confs(n):
    return [Configuration.from_code(c, n) for c in range(1 << n)]


def test_apply_update_examples(both_xor):
    assert apply_update(both_xor, conf("01"), {0}) == conf("11")
    assert apply_update(both_xor, conf("11"), {0, 1}) == conf("00")
    assert apply_update(both_xor, conf("00"), {0, 1}) == conf("00")


def test_apply_update_errors(both_xor):
    with pytest.raises(DomainError):
        apply_update(both_xor, conf("01"), set())
    with pytest.raises(OutOfRangeError):
        apply_update(both_xor, conf("01"), {2})


def test_apply_update_no_cascade_and_identity_outside_W():
    rng = random.Random(1)
    for n in range(1, 5):
        N = random_network(rng, n)
        fns = [lambda b, f=f: f.table[Configuration(b).code] for f in N.functions]
        for x in all_confs(n):
            for wm in range(1, 1 << n):
                W = {i for i in range(n) if wm >> i & 1}
                y = apply_update(N, x, W)
                assert y.bits == brute_update(fns, x.bits, W)
                assert all(y[i] == x[i] for i in range(n) if i not in W)


def test_apply_schedule_block_example():
    N = make_circulant(CirculantSpec(3, frozenset({2, 0})))
    u = UpdateSchedule((frozenset({0}), frozenset({1, 2})))
    # oracle: f_i = x_{i-1} ^ x_i evaluated block by block
    fns = [lambda b, i=i: b[(i - 1) % 3] ^ b[i] for i in range(3)]
    expected = brute_update(fns, brute_update(fns, (1, 0, 0), {0}), {1, 2})
    assert expected == (1, 1, 0)
    assert apply_schedule(N, u, conf("100")) == conf("110")


def test_parallel_schedule_equals_full_update():
    rng = random.Random(20)
    for _ in range(20):
        n = rng.randint(1, 6)
        N = random_network(rng, n)
        x = Configuration.from_code(rng.randrange(1 << n), n)
        assert apply_schedule(N, UpdateSchedule.parallel(n), x) == apply_update(N, x, range(n))


def test_empty_schedule_is_identity(both_xor):
    assert apply_schedule(both_xor, UpdateSchedule(()), conf("01")) == conf("01")


def test_schedule_parse():
    assert UpdateSchedule.parse("{0}{1,2}", 3).blocks == (frozenset({0}), frozenset({1, 2}))
    assert UpdateSchedule.parse("parallel", 3) == UpdateSchedule.parallel(3)
    assert UpdateSchedule.parse("sequential", 2).blocks == (frozenset({0}), frozenset({1}))
    assert str(UpdateSchedule.parse("{2,1} {0}", 3)) == "{1,2}{0}"
    with pytest.raises(ParseError):
        UpdateSchedule.parse("{0}{", 3)
    with pytest.raises(OutOfRangeError):
        UpdateSchedule.parse("{3}", 3)
    with pytest.raises(DomainError):
        UpdateSchedule((frozenset(),))


def test_graph_counts(both_xor):
    a = build_transition_graph(both_xor, ASYNCHRONOUS)
    g = build_transition_graph(both_xor, GENERAL)
    assert a.size == 4 and a.edge_count() == 8
    assert g.size == 4 and g.edge_count() == 12
    assert (frozenset({0, 1}), 0) in g.transitions(conf("11").code)


def test_out_degrees_and_async_subgraph():
    rng = random.Random(3)
    for n in (1, 2, 3):
        N = random_network(rng, n)
        g = build_transition_graph(N, GENERAL)
        a = build_transition_graph(N, ASYNCHRONOUS)
        d = build_transition_graph(N, DETERMINISTIC, random_block_schedule(rng, n))
        for c in range(1 << n):
            tg = g.transitions(c)
            ta = a.transitions(c)
            assert len(tg) == (1 << n) - 1
            assert len(ta) == n
            assert len(d.transitions(c)) == 1
            assert set(ta) == {(W, t) for W, t in tg if len(W) == 1}


def test_parallel_graph_matches_apply_update():
    rng = random.Random(4)
    N = random_network(rng, 5)
    d = build_transition_graph(N, DETERMINISTIC, UpdateSchedule.parallel(5))
    for x in all_confs(5):
        assert d.successor(x.code) == apply_update(N, x, range(5)).code


def test_capacity_errors():
    big = Network(tuple(LocalFunction.constant(11, 0) for _ in range(11)))
    with pytest.raises(CapacityError, match="cap n <= 10"):
        build_transition_graph(big, GENERAL)
    build_transition_graph(big, ASYNCHRONOUS)
    with pytest.raises(CapacityError, match="cap n <= 3"):
        sensitivity_scan(4)


def test_is_sequentialisable_examples(both_xor):
    r = is_sequentialisable(both_xor, conf("11"), {0, 1})
    assert not r and r.target == conf("00")
    r = is_sequentialisable(both_xor, conf("01"), {0, 1})
    assert r
    assert r.path == (conf("01"), conf("11"))
    assert r.updates == (0,)
    for x in all_confs(2):
        for i in range(2):
            r = is_sequentialisable(both_xor, x, {i})
            assert r and len(r.updates) == 1


def _reachable(N, start, target):
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        if c == target:
            return True
        for i in range(N.n):
            d = apply_update(N, Configuration.from_code(c, N.n), {i}).code
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return False


def test_is_sequentialisable_against_reachability_and_witness_revalidates():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(2, 4)
        N = random_network(rng, n)
        for x in all_confs(n):
            wm = rng.randrange(1, 1 << n)
            W = {i for i in range(n) if wm >> i & 1}
            target = apply_update(N, x, W)
            r = is_sequentialisable(N, x, W)
            if target == x:
                assert r
            assert bool(r) == (_reachable(N, x.code, target.code) or len(W) == 1)
            if r:
                assert r.path[0] == x and r.path[-1] == target
                for k, i in enumerate(r.updates):
                    assert apply_update(N, r.path[k], {i}) == r.path[k + 1]


def test_sensitivity_scan_size_two():
    found = sensitivity_scan(2)
    nets = [N for N, _ in found]
    for F in xor_family():
        assert F in nets
    assert len(nets) == 4
    assert all(not network_monotone(N).monotone for N in nets)
    ev = dict((N, e) for N, e in found)[xor_family()[0]]
    assert ev.async_recurrent == {0, 1, 2, 3}
    assert ev.general_recurrent == {0}
    assert not is_sequentialisable(xor_family()[0], Configuration.from_code(ev.x, 2), ev.W)


def test_sensitivity_scan_size_one_empty():
    assert sensitivity_scan(1) == []


def test_sensitivity_scan_parallel_matches_serial():
    assert [N for N, _ in sensitivity_scan(2, jobs=3)] == [N for N, _ in sensitivity_scan(2)]


def test_differ_criterion_admits_monotone_networks():
    nor = network_of(lambda x: (1 - x[0]) & (1 - x[1]), lambda x: (1 - x[0]) & (1 - x[1]))
    assert network_monotone(nor).monotone
    assert network_sensitivity(nor) is None
    assert network_sensitivity(nor, "differ") is not None
    assert len(sensitivity_scan(2, criterion="differ")) == 16


def test_dot_export(both_xor):
    dot = to_dot(build_transition_graph(both_xor, GENERAL))
    assert '"11" -> "00" [label="{0,1}"];' in dot
    assert '"00" -> "00" [label="{0}, {1}, {0,1}"];' in dot
    det = to_dot(build_transition_graph(both_xor, DETERMINISTIC))
    assert '"01" -> "11";' in det and "label=\"{" not in det


def test_stable_only_remark_report():
    """Recurrence under parallel/sequential schedules, recorded rather than asserted as a law."""
    swap = network_of(lambda x: x[1], lambda x: x[0])
    report = {}
    for name, u in (("parallel", UpdateSchedule.parallel(2)), ("sequential", UpdateSchedule.sequential(2))):
        atts = find_attractors(build_transition_graph(swap, DETERMINISTIC, u))
        report[name] = sorted(a.size for a in atts)
    # the swap network keeps a period-2 cycle under the parallel schedule
    assert report == {"parallel": [1, 1, 2], "sequential": [1, 1]}


def test_recurrent_set_both_xor(both_xor):
    assert recurrent_set(build_transition_graph(both_xor, ASYNCHRONOUS)) == {0, 1, 2, 3}
    assert recurrent_set(build_transition_graph(both_xor, GENERAL)) == {0}
