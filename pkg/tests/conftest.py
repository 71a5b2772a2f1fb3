import random

import pytest

from commcert import MatD, QuaternionAlgebra, random_quat


@pytest.fixture(scope="session")
def alg():
    return QuaternionAlgebra()


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def rand_unit(alg, rng, span=2):
    return random_quat(alg, rng, span=span, nonzero=True)


def rand_lower(alg, n, rng, span=1):
    from commcert.certify import random_unitriangular

    return random_unitriangular(alg, n, rng, lower=True, span=span)


def rand_upper(alg, n, rng, span=1):
    from commcert.certify import random_unitriangular

    return random_unitriangular(alg, n, rng, lower=False, span=span)


def rand_invertible(alg, n, rng):
    from commcert.matrix import random_invertible

    return random_invertible(alg, n, rng, random_quat)


def mat_comm(x, y):
    return x * y * x.inverse() * y.inverse()


def mat_product(alg, n, ms):
    out = MatD.identity(alg, n)
    for m in ms:
        out = out * m
    return out
