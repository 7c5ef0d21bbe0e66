"""
Exceptional and strongly exceptional collections of line bundles.

Ext^i(O(A), O(B)) = H^i(O(B - A)), so verifying a collection is a grid of
cohomology computations over the pairwise differences. The constructor for
fiber bundles interleaves a fiber collection with a base collection twisted
by multiples of a base divisor D, raising D until the result verifies.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from cohomology import CohomologyTable, cohomology
from config import Config
from errors import CollectionError, FanMismatchError, PreconditionError, TwistSearchExhausted
from fan import Fan, TDivisor
from fibration import FibrationBundle, lift_from_fiber, pullback_from_base

logger = logging.getLogger(__name__)

FULLNESS_UNVERIFIED = 'not certified'
FULLNESS_BY_THEOREM = 'by theorem, conditional on fullness of the input collections'


@dataclass(frozen=True)
class OrderedCollection:
    fan: Fan = field(repr=False)
    classes: tuple[TDivisor, ...]

    @classmethod
    def of(cls, fan: Fan, divisors: Sequence[TDivisor | Sequence[int]]) -> 'OrderedCollection':
        if not divisors:
            raise CollectionError("a collection needs at least one line bundle")
        classes = []
        for item in divisors:
            divisor = item if isinstance(item, TDivisor) else fan.divisor(item)
            if divisor.fan != fan:
                raise FanMismatchError(f"{divisor} does not live on '{fan}'")
            classes.append(fan.canonical_representation(divisor))
        seen = set()
        for position, divisor in enumerate(classes):
            if divisor.coeffs in seen:
                raise CollectionError(f"class {divisor} at position {position} is repeated")
            seen.add(divisor.coeffs)
        return cls(fan, tuple(classes))

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, index: int) -> TDivisor:
        return self.classes[index]


@dataclass(frozen=True)
class CollectionReport:
    fan_name: str
    collection: OrderedCollection
    is_exceptional: bool
    is_strongly_exceptional: bool
    length_equals_k0_rank: bool
    gram_unitriangular: bool
    # evidence[(j, k)] = dims of Ext^*(E_j, E_k)
    evidence: dict[tuple[int, int], tuple[int, ...]]
    gram: tuple[tuple[int, ...], ...]
    violations: int
    fullness: str = FULLNESS_UNVERIFIED

    @property
    def length(self) -> int:
        return len(self.collection)

    def to_dict(self) -> dict:
        return {
            'fan': self.fan_name,
            'collection': [list(d.coeffs) for d in self.collection],
            'length': self.length,
            'is_exceptional': self.is_exceptional,
            'is_strongly_exceptional': self.is_strongly_exceptional,
            'length_equals_k0_rank': self.length_equals_k0_rank,
            'gram_unitriangular': self.gram_unitriangular,
            'violations': self.violations,
            'fullness': self.fullness,
            'gram': [list(row) for row in self.gram],
            'evidence': [
                {'from': j, 'to': k, 'ext': list(dims)}
                for (j, k), dims in sorted(self.evidence.items())
            ],
        }


def _ext_table(fan: Fan, collection: OrderedCollection, jobs: int) -> dict[tuple[int, int], CohomologyTable]:
    pairs = [(j, k) for j in range(len(collection)) for k in range(len(collection))]
    differences = {}
    for j, k in pairs:
        differences.setdefault((collection[k] - collection[j]).coeffs, []).append((j, k))

    def compute(coeffs):
        return coeffs, cohomology(fan, fan.divisor(coeffs))

    if jobs > 1 and len(differences) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(compute, differences))
    else:
        results = [compute(coeffs) for coeffs in differences]

    table = {}
    for coeffs, result in results:
        for pair in differences[coeffs]:
            table[pair] = result
    return table


def check_collection(fan: Fan, collection: OrderedCollection, jobs: int | None = None,
                     fullness: str = FULLNESS_UNVERIFIED) -> CollectionReport:
    if collection.fan != fan:
        raise FanMismatchError(f"collection lives on '{collection.fan}', not on '{fan}'")
    fan.require_valid()
    tables = _ext_table(fan, collection, jobs or 1)
    size = len(collection)

    backward = 0
    forward_higher = 0
    diagonal = 0
    for (j, k), table in tables.items():
        if j == k:
            diagonal += (table[0] != 1) + sum(1 for h in table.dims[1:] if h)
        elif j > k:
            # Ext^*(E_j, E_k) with j after k must vanish entirely
            backward += sum(1 for h in table.dims if h)
        else:
            forward_higher += sum(1 for h in table.dims[1:] if h)

    gram = tuple(
        tuple(tables[(j, k)].euler for k in range(size)) for j in range(size)
    )
    unitriangular = all(gram[j][j] == 1 for j in range(size)) and all(
        gram[k][j] == 0 for k in range(size) for j in range(k)
    )
    exceptional = backward == 0 and diagonal == 0
    report = CollectionReport(
        fan_name=str(fan),
        collection=collection,
        is_exceptional=exceptional,
        is_strongly_exceptional=exceptional and forward_higher == 0,
        length_equals_k0_rank=size == fan.euler_characteristic(),
        gram_unitriangular=unitriangular,
        evidence={pair: table.dims for pair, table in tables.items()},
        gram=gram,
        violations=backward + forward_higher + diagonal,
        fullness=fullness,
    )
    if not report.is_strongly_exceptional:
        logger.info("Collection of length %d on '%s' has %d non-vanishing entries",
                    size, fan, report.violations)
    return report


def global_twist(collection: OrderedCollection, L: TDivisor) -> OrderedCollection:
    return OrderedCollection.of(collection.fan, [E + L for E in collection])


def box_collection(bundle: FibrationBundle, fiber_coll: OrderedCollection,
                   base_coll: OrderedCollection) -> OrderedCollection:
    """Products lift(L) + pullback(E), the fiber factor varying fastest."""
    _require_on(bundle, fiber_coll, base_coll)
    return OrderedCollection.of(bundle.total, [
        lift_from_fiber(bundle, L) + pullback_from_base(bundle, E)
        for E in base_coll
        for L in fiber_coll
    ])


def theorem_sequence(bundle: FibrationBundle, fiber_coll: OrderedCollection,
                     base_coll: OrderedCollection, D: TDivisor) -> OrderedCollection:
    """
    Blocks k = 1..u, block k holding pullback(E_j + k D) + lift(L_k) for j = 1..v.
    """
    _require_on(bundle, fiber_coll, base_coll)
    divisors = []
    for k, L in enumerate(fiber_coll, start=1):
        lifted = lift_from_fiber(bundle, L)
        for E in base_coll:
            divisors.append(pullback_from_base(bundle, E + k * D) + lifted)
    return OrderedCollection.of(bundle.total, divisors)


def is_projective_base(bundle: FibrationBundle) -> bool:
    """A smooth complete base with Picard rank one, that is P^n."""
    return bundle.base.n_rays == bundle.base.rank + 1


def projective_base_collection(bundle: FibrationBundle,
                               fiber_coll: OrderedCollection) -> OrderedCollection:
    """
    lift(L) + k Z for L over the fiber collection and k = 0..n, k varying
    fastest, where Z is the pullback of the hyperplane class of a P^n base.
    Needs no twist search.
    """
    if not is_projective_base(bundle):
        raise PreconditionError(f"the base '{bundle.base}' is not a projective space")
    if fiber_coll.fan != bundle.fiber:
        raise FanMismatchError(f"fiber collection does not live on '{bundle.fiber}'")
    Z = pullback_from_base(bundle, default_step(bundle))
    return OrderedCollection.of(bundle.total, [
        lift_from_fiber(bundle, L) + k * Z
        for L in fiber_coll
        for k in range(bundle.base.rank + 1)
    ])


def _require_on(bundle, fiber_coll, base_coll):
    if fiber_coll.fan != bundle.fiber:
        raise FanMismatchError(f"fiber collection does not live on '{bundle.fiber}'")
    if base_coll.fan != bundle.base:
        raise FanMismatchError(f"base collection does not live on '{bundle.base}'")


def default_step(bundle: FibrationBundle) -> TDivisor:
    """The divisor of the first base free ray."""
    coeffs = [0] * bundle.base.n_rays
    coeffs[bundle.base_pic.free_rays[0]] = 1
    return bundle.base.divisor(coeffs)


@dataclass(frozen=True)
class TwistAttempt:
    t: int
    violations: int
    strongly_exceptional: bool


@dataclass(frozen=True)
class ConstructionResult:
    t: int
    collection: OrderedCollection
    report: CollectionReport
    attempts: tuple[TwistAttempt, ...]


def construct_mainthm(bundle: FibrationBundle, fiber_coll: OrderedCollection,
                      base_coll: OrderedCollection, D_step: TDivisor | None = None,
                      t_cap: int | None = None, jobs: int | None = None) -> ConstructionResult:
    """
    Search t = 1..t_cap for a twist D = t * D_step making theorem_sequence
    strongly exceptional on the total space.

    Both input collections must verify strongly exceptional on their own fans;
    their fullness is taken on trust and recorded as such in the report.
    """
    t_cap = t_cap or Config.TWIST_SEARCH_CAP
    if t_cap < 1:
        raise PreconditionError("t_cap must be positive")
    for label, fan, coll in (('fiber', bundle.fiber, fiber_coll), ('base', bundle.base, base_coll)):
        if not check_collection(fan, coll, jobs).is_strongly_exceptional:
            raise PreconditionError(f"the {label} collection is not strongly exceptional on '{fan}'")
    D_step = D_step if D_step is not None else default_step(bundle)
    if D_step.fan != bundle.base:
        raise FanMismatchError(f"step divisor {D_step} does not live on '{bundle.base}'")

    attempts = []
    best = None
    for t in range(1, t_cap + 1):
        sequence = theorem_sequence(bundle, fiber_coll, base_coll, t * D_step)
        report = check_collection(bundle.total, sequence, jobs, fullness=FULLNESS_BY_THEOREM)
        attempts.append(TwistAttempt(t, report.violations, report.is_strongly_exceptional))
        logger.info("Twist t=%d on '%s': %d violations", t, bundle.name, report.violations)
        if report.is_strongly_exceptional:
            return ConstructionResult(t, sequence, report, tuple(attempts))
        if best is None or report.violations < best.violations:
            best = report
    raise TwistSearchExhausted(t_cap, best, tuple(attempts))
