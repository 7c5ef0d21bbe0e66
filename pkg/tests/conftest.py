import random
from math import comb

import pytest

import catalog
from fan import Fan


@pytest.fixture
def p1():
    return catalog.projective_space(1)


@pytest.fixture
def p2():
    return catalog.projective_space(2)


@pytest.fixture
def p3():
    return catalog.projective_space(3)


@pytest.fixture
def p1xp1():
    return catalog.product(catalog.projective_space(1), catalog.projective_space(1))


@pytest.fixture
def p1xp2():
    return catalog.product(catalog.projective_space(1), catalog.projective_space(2))


@pytest.fixture(params=[0, 1, 2, 3])
def hirzebruch(request):
    return catalog.hirzebruch(request.param)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def two_cone_p2():
    return Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2)), 'P2 missing a cone')


def catalog_fans():
    return [entry.fan for entry in catalog.entries()]


def catalog_bundles():
    return [entry.bundle for entry in catalog.entries() if entry.bundle is not None]


def projective_oracle(n, k):
    """h^*(P^n, O(k)) in closed form, independent of the sign-pattern engine"""
    dims = [0] * (n + 1)
    if k >= 0:
        dims[0] = comb(n + k, n)
    if k <= -n - 1:
        dims[n] = comb(-k - 1, n)
    return tuple(dims)


def random_divisor(fan, rng, low=-3, high=3):
    return fan.divisor(tuple(rng.randint(low, high) for _ in range(fan.n_rays)))
