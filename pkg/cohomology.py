"""
Line-bundle cohomology by sign-pattern enumeration.

For a representation r of L and a set S of rays, the characters m with
<m, v_i> + r_i >= 0 exactly for i in S form the lattice points of a rational
polyhedron. Each such m contributes the reduced homology of the support complex
of S, with H^p fed by homology in degree rank - 1 - p. Only patterns with
non-zero homology are visited, and their homologies are computed once per fan.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import TYPE_CHECKING

from config import Config
from errors import FanMismatchError, NonFiniteCohomologyError, PreconditionError, RepresentationError
from fan import Fan, TDivisor
from homology import (
    HomologyProfile,
    all_patterns,
    join_homology,
    reduced_homology,
    support_complex,
)
from lattice import (
    Inequality,
    RationalPolyhedron,
    enumerate_lattice_points,
    has_trivial_recession_cone,
)
from utils.cache import cache_result

if TYPE_CHECKING:
    from fibration import FibrationBundle

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LedgerEntry:
    pattern: tuple[int, ...]
    points: int
    homology: tuple[int, ...]
    # contributions[p] = points * dim of homology in degree rank - 1 - p
    contributions: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            'pattern': list(self.pattern),
            'points': self.points,
            'homology': list(self.homology),
            'contributions': list(self.contributions),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'LedgerEntry':
        return cls(
            tuple(data['pattern']),
            data['points'],
            tuple(data['homology']),
            tuple(data['contributions']),
        )


@dataclass(frozen=True)
class CohomologyTable:
    dims: tuple[int, ...]
    ledger: tuple[LedgerEntry, ...] = ()

    def __getitem__(self, p: int) -> int:
        return self.dims[p] if 0 <= p < len(self.dims) else 0

    @property
    def euler(self) -> int:
        return sum((-1) ** p * h for p, h in enumerate(self.dims))

    @property
    def is_acyclic(self) -> bool:
        return not any(self.dims[1:])

    def feeders(self, p: int) -> list[tuple[int, ...]]:
        """Sign patterns with a non-zero contribution to H^p."""
        return [entry.pattern for entry in self.ledger if entry.contributions[p]]

    def to_dict(self) -> dict:
        return {
            'dims': list(self.dims),
            'ledger': [entry.to_dict() for entry in self.ledger],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'CohomologyTable':
        return cls(
            tuple(data['dims']),
            tuple(LedgerEntry.from_dict(entry) for entry in data.get('ledger', [])),
        )


@dataclass(frozen=True)
class _Pattern:
    rays: frozenset[int]
    homology: HomologyProfile
    bounded: bool


class CohomologyEngine:
    """Cohomology of line bundles on one fan, with per-fan caches."""

    def __init__(self, fan: Fan, jobs: int | None = None, store=None, validate: bool = True):
        if validate:
            fan.require_valid()
        self.fan = fan
        self.jobs = max(1, jobs or 1)
        self._lock = threading.Lock()
        self._patterns_lock = threading.Lock()
        self._patterns: tuple[_Pattern, ...] | None = None
        self._homology: dict[frozenset[int], HomologyProfile] = {}
        self._tables: dict[tuple[int, ...], CohomologyTable] = {}

        compute = self._compute
        if store is not None:
            compute = cache_result(
                partial(store.cache_cohomology, fan),
                partial(store.get_cached_cohomology, fan),
            )(compute)
        self._compute_cached = compute

    def pattern_homology(self, pattern: frozenset[int]) -> HomologyProfile:
        with self._lock:
            cached = self._homology.get(pattern)
        if cached is not None:
            return cached
        profile = reduced_homology(support_complex(self.fan, pattern))
        # concurrent writers compute equal values
        with self._lock:
            self._homology.setdefault(pattern, profile)
        return profile

    def contributing_patterns(self) -> tuple[_Pattern, ...]:
        # one enumeration per engine, whichever worker asks first
        with self._patterns_lock:
            if self._patterns is None:
                self._patterns = self._find_patterns()
        return self._patterns

    def _find_patterns(self) -> tuple[_Pattern, ...]:
        found = []
        for pattern in all_patterns(self.fan.n_rays):
            profile = self.pattern_homology(pattern)
            if profile.is_zero:
                continue
            bounded = has_trivial_recession_cone(self._region(pattern, (0,) * self.fan.n_rays))
            found.append(_Pattern(pattern, profile, bounded))
        logger.debug("Fan '%s': %d of %d sign patterns carry homology",
                     self.fan, len(found), 2 ** self.fan.n_rays)
        return tuple(found)

    def _region(self, pattern: frozenset[int], coeffs: tuple[int, ...]) -> RationalPolyhedron:
        inequalities = []
        for i, ray in enumerate(self.fan.rays):
            if i in pattern:
                inequalities.append(Inequality.at_least(ray, -coeffs[i]))
            else:
                inequalities.append(Inequality.at_most(ray, -coeffs[i], strict=True))
        return RationalPolyhedron(self.fan.rank, tuple(inequalities))

    def _count(self, pattern: _Pattern, coeffs: tuple[int, ...]) -> int:
        if not pattern.bounded:
            raise NonFiniteCohomologyError(
                f"non-finite cohomology: sign pattern {sorted(pattern.rays)} on '{self.fan}' "
                "has an unbounded character region (fan not complete or invariant violated)"
            )
        return len(enumerate_lattice_points(self._region(pattern.rays, coeffs)))

    def _compute(self, coeffs: tuple[int, ...]) -> CohomologyTable:
        n = self.fan.rank
        patterns = self.contributing_patterns()
        if self.jobs > 1 and len(patterns) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                counts = list(pool.map(lambda pattern: self._count(pattern, coeffs), patterns))
        else:
            counts = [self._count(pattern, coeffs) for pattern in patterns]

        dims = [0] * (n + 1)
        ledger = []
        for pattern, points in zip(patterns, counts):
            if not points:
                continue
            contributions = tuple(points * pattern.homology[n - 1 - p] for p in range(n + 1))
            for p, value in enumerate(contributions):
                dims[p] += value
            ledger.append(LedgerEntry(
                tuple(sorted(pattern.rays)), points, pattern.homology.dims, contributions,
            ))
        return CohomologyTable(tuple(dims), tuple(ledger))

    def cohomology(self, L: TDivisor) -> CohomologyTable:
        if L.fan is not self.fan and L.fan != self.fan:
            raise FanMismatchError(f"divisor {L} does not live on '{self.fan}'")
        key = L.coeffs
        with self._lock:
            table = self._tables.get(key)
        if table is None:
            table = self._compute_cached(key)
            with self._lock:
                self._tables.setdefault(key, table)
        return table


def _default_store():
    if not Config.COHOMOLOGY_CACHE:
        return None
    from database import db
    db.initialize()
    return db


@lru_cache(maxsize=None)
def engine_for(fan: Fan, jobs: int | None = None) -> CohomologyEngine:
    return CohomologyEngine(fan, jobs=jobs, store=_default_store())


def cohomology(fan: Fan, L: TDivisor, jobs: int | None = None) -> CohomologyTable:
    return engine_for(fan, jobs).cohomology(L)


def is_acyclic(fan: Fan, L: TDivisor) -> bool:
    return cohomology(fan, L).is_acyclic


def euler_pairing(fan: Fan, A: TDivisor, B: TDivisor) -> int:
    """chi(O(A), O(B)) = sum of (-1)^k h^k(B - A)."""
    return cohomology(fan, B - A).euler


def serre_dual(fan: Fan, L: TDivisor) -> TDivisor:
    """K_X - L, whose cohomology is that of L in reversed degrees."""
    return -fan.canonical_divisor() - L


@dataclass(frozen=True)
class RepresentationSplit:
    r1: TDivisor
    r2: TDivisor
    correction: TDivisor


def twist_correction(bundle: 'FibrationBundle', r1: TDivisor) -> TDivisor:
    """The base divisor with sum_k a_k gamma_k^j on base free ray j, a_k read off the fiber basis rays."""
    base = bundle.base
    coeffs = [0] * base.n_rays
    basis = bundle.fiber_pic.basis_rays
    for col, ray in enumerate(bundle.base_pic.free_rays):
        coeffs[ray] = sum(r1.coeffs[k_ray] * bundle.twist[k][col] for k, k_ray in enumerate(basis))
    return base.divisor(coeffs)


def decompose_representation(bundle: 'FibrationBundle', r: TDivisor,
                             line_bundle: TDivisor | None = None) -> RepresentationSplit:
    """
    Split a representation on the total space into its fiber and base parts.

    r1 represents the restriction of the class to the fiber; r2 represents the
    base component shifted by the twist correction of r1.
    """
    total = bundle.total
    if r.fan != total:
        raise FanMismatchError(f"representation {r} does not live on '{total}'")
    if line_bundle is not None and not total.same_class(r, line_bundle):
        raise RepresentationError(f"{r} is not a representation of {line_bundle}")
    r1 = bundle.fiber.divisor(tuple(r.coeffs[i] for i in bundle.fiber_rays))
    r2 = bundle.base.divisor(tuple(r.coeffs[j] for j in bundle.base_rays))
    return RepresentationSplit(r1, r2, twist_correction(bundle, r1))


def kunneth_check(bundle: 'FibrationBundle', r: TDivisor) -> bool:
    split = decompose_representation(bundle, r)
    whole = reduced_homology(support_complex(bundle.total, r.nonnegative_rays()))
    fiber_part = reduced_homology(support_complex(bundle.fiber, split.r1.nonnegative_rays()))
    base_part = reduced_homology(support_complex(bundle.base, split.r2.nonnegative_rays()))
    return whole == join_homology(fiber_part, base_part)


def acyclic_pullback_check(bundle: 'FibrationBundle', L: TDivisor, H: TDivisor) -> bool:
    """
    Whether the lift of a non-effective acyclic fiber bundle L, twisted by the
    pullback of any base divisor H, is acyclic on the total space.
    """
    from fibration import lift_from_fiber, pullback_from_base

    on_fiber = cohomology(bundle.fiber, L)
    if on_fiber[0] != 0:
        raise PreconditionError(f"{L} has sections on the fiber (h0 = {on_fiber[0]})")
    if not on_fiber.is_acyclic:
        raise PreconditionError(f"{L} is not acyclic on the fiber: h = {on_fiber.dims}")
    combined = lift_from_fiber(bundle, L) + pullback_from_base(bundle, H)
    return is_acyclic(bundle.total, combined)
