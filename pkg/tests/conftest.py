import numpy as np
import pytest

from xorban.netcore import Configuration, LocalFunction, Network


def conf(text):
    return Configuration.from_string(text)


def gf2_matrix(n, coeffs):
    """Circulant interaction matrix, C[i][j] = c[(j - i) mod n]."""
    row0 = np.zeros(n, dtype=np.int64)
    row0[list(coeffs)] = 1
    return np.array([np.roll(row0, i) for i in range(n)])


def matrix_step(n, coeffs, bits):
    """Independent oracle for one parallel step: C . x mod 2."""
    return tuple(int(v) for v in gf2_matrix(n, coeffs) @ np.array(bits) % 2)


def matrix_iterate(n, coeffs, bits, t):
    for _ in range(t):
        bits = matrix_step(n, coeffs, bits)
    return bits


def brute_update(fns, bits, W):
    """F_W evaluated from plain Python callables on tuples."""
    return tuple(fns[i](bits) if i in W else b for i, b in enumerate(bits))


def network_of(*fns):
    n = len(fns)
    return Network(tuple(LocalFunction.from_callable(n, lambda x, f=f: f(x.bits)) for f in fns))


XOR = lambda x: x[0] ^ x[1]  # noqa: E731


@pytest.fixture
def both_xor():
    return network_of(XOR, XOR)
