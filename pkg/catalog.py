"""Built-in fans and bundles with their reference collections."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable

from config import Config
from errors import CatalogError
from exceptional import OrderedCollection, box_collection, projective_base_collection
from fan import Fan
from fibration import FibrationBundle, build_fibration

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def projective_space(n: int) -> Fan:
    if not 1 <= n <= Config.CATALOG_MAX_PROJECTIVE_DIM:
        raise CatalogError(
            f"projective space dimension must lie in 1..{Config.CATALOG_MAX_PROJECTIVE_DIM}, got {n}"
        )
    rays = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    rays.append((-1,) * n)
    cones = tuple(combinations(range(n + 1), n))
    return Fan(n, tuple(rays), cones, f"P{n}")


def beilinson(fan: Fan) -> OrderedCollection:
    """(O, O(1), ..., O(n)) with O(1) the divisor of the last ray."""
    n = fan.rank
    return OrderedCollection.of(fan, [
        tuple(k if i == fan.n_rays - 1 else 0 for i in range(fan.n_rays))
        for k in range(n + 1)
    ])


def product(first: Fan, second: Fan) -> FibrationBundle:
    if first.rank < 1 or second.rank < 1:
        raise CatalogError("product factors must have positive rank")
    base_pic = second.pic_basis()
    twist = tuple((0,) * len(base_pic.free_rays) for _ in range(first.rank))
    return build_fibration(first, second, twist)


def hirzebruch(a: int) -> FibrationBundle:
    if not 0 <= a <= Config.CATALOG_MAX_HIRZEBRUCH:
        raise CatalogError(f"Hirzebruch parameter must lie in 0..{Config.CATALOG_MAX_HIRZEBRUCH}, got {a}")
    line = projective_space(1)
    return build_fibration(line, line, ((a,),), name=f"F{a}")


def p1_bundle_over_p2(g: int) -> FibrationBundle:
    if abs(g) > Config.CATALOG_MAX_HIRZEBRUCH:
        raise CatalogError(f"twist must lie in -{Config.CATALOG_MAX_HIRZEBRUCH}..{Config.CATALOG_MAX_HIRZEBRUCH}, got {g}")
    return build_fibration(projective_space(1), projective_space(2), ((g,),),
                           name=f"P(O+O({g})) over P2")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: tuple[int, ...]
    fan: Fan
    # reference full strongly exceptional collection in closed form
    collection: OrderedCollection
    bundle: FibrationBundle | None = None
    fiber_collection: OrderedCollection | None = None
    base_collection: OrderedCollection | None = None


def _projective_entry(n):
    fan = projective_space(n)
    return CatalogEntry('projective', (n,), fan, collection=beilinson(fan))


def _bundle_entry(name, params, bundle):
    fiber_coll = beilinson(bundle.fiber)
    base_coll = beilinson(bundle.base)
    if bundle.is_twisted:
        collection = projective_base_collection(bundle, fiber_coll)
    else:
        collection = box_collection(bundle, fiber_coll, base_coll)
    return CatalogEntry(name, params, bundle.total, collection, bundle, fiber_coll, base_coll)


def _product_entry(n, m):
    return _bundle_entry('product', (n, m), product(projective_space(n), projective_space(m)))


def _hirzebruch_entry(a):
    return _bundle_entry('hirzebruch', (a,), hirzebruch(a))


def _p1_over_p2_entry(g):
    return _bundle_entry('p1-over-p2', (g,), p1_bundle_over_p2(g))


GENERATORS: dict[str, tuple[int, Callable[..., CatalogEntry], str]] = {
    'projective': (1, _projective_entry, 'projective space P^n'),
    'product': (2, _product_entry, 'product P^n x P^m'),
    'hirzebruch': (1, _hirzebruch_entry, 'Hirzebruch surface F_a'),
    'p1-over-p2': (1, _p1_over_p2_entry, 'P1-bundle over P2 with twist g'),
}


def load(name: str, *params: int) -> CatalogEntry:
    if name not in GENERATORS:
        raise CatalogError(f"unknown catalog entry '{name}' (known: {', '.join(sorted(GENERATORS))})")
    arity, generator, _ = GENERATORS[name]
    if len(params) != arity:
        raise CatalogError(f"'{name}' takes {arity} integer parameter(s), got {len(params)}")
    logger.debug("Loading catalog entry %s%s", name, params)
    return generator(*(int(p) for p in params))


def entries() -> list[CatalogEntry]:
    """Every catalog object exercised by the test suite."""
    items = [load('projective', n) for n in range(1, 4)]
    items += [load('product', 1, 1), load('product', 1, 2)]
    items += [load('hirzebruch', a) for a in range(0, 4)]
    items.append(load('p1-over-p2', 1))
    return items
