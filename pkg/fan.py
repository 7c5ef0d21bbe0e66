"""
Fans of smooth complete toric varieties.

A Fan stores primitive ray generators and maximal cones as index sets. From it
we get toric divisors, a Picard basis attached to a maximal cone, canonical
divisor representations, primitive collections with their relations, and the
cone counts behind the Euler characteristic and the Poincare polynomial.
"""

import hashlib
import json
import logging
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb, gcd
from typing import Iterable, Sequence

from config import Config
from errors import FanMismatchError, FanValidationError
from lattice import (
    Inequality,
    IntMatrix,
    IntVector,
    determinant,
    dot,
    is_feasible,
    mat_vec,
    solve_integer,
    transpose,
    unimodular_inverse,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    problems: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    fan_name: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> tuple[Check, ...]:
        return tuple(check for check in self.checks if not check.passed)

    def check(self, name: str) -> Check | None:
        return next((check for check in self.checks if check.name == name), None)

    def _ok(self, *names) -> bool:
        found = [self.check(name) for name in names]
        return all(check is not None and check.passed for check in found)

    @property
    def smooth(self) -> bool:
        return self._ok('structure', 'primitive', 'smooth')

    @property
    def complete(self) -> bool:
        return self._ok('structure', 'complete')

    def to_dict(self) -> dict:
        return {
            'fan': self.fan_name,
            'passed': self.passed,
            'checks': [
                {'name': c.name, 'passed': c.passed, 'problems': list(c.problems)}
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: tuple[IntVector, ...]
    max_cones: tuple[tuple[int, ...], ...]
    name: str = field(default='', compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'rank', int(self.rank))
        object.__setattr__(self, 'rays', tuple(tuple(int(c) for c in ray) for ray in self.rays))
        object.__setattr__(
            self, 'max_cones',
            tuple(tuple(sorted(int(i) for i in cone)) for cone in self.max_cones),
        )

    def __str__(self):
        return self.name or f"fan({self.n_rays} rays, rank {self.rank})"

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def picard_number(self) -> int:
        return self.n_rays - self.rank

    @cached_property
    def cones(self) -> frozenset[frozenset[int]]:
        """Every cone of the fan as a ray-index set, the zero cone included."""
        faces = set()
        for cone in self.max_cones:
            for size in range(len(cone) + 1):
                faces.update(frozenset(face) for face in combinations(cone, size))
        return frozenset(faces)

    def is_cone(self, rays: Iterable[int]) -> bool:
        return frozenset(rays) in self.cones

    def fingerprint(self) -> str:
        payload = json.dumps(
            {'rank': self.rank, 'rays': self.rays, 'max_cones': self.max_cones},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:32]

    # Validation
    @cached_property
    def _report(self) -> ValidationReport:
        return validate(self)

    def validate(self) -> ValidationReport:
        return self._report

    def require_valid(self) -> 'Fan':
        report = self._report
        if not report.passed:
            raise FanValidationError(report)
        return self

    # Divisors
    def divisor(self, coeffs: Sequence[int]) -> 'TDivisor':
        return TDivisor(self, tuple(coeffs))

    def zero_divisor(self) -> 'TDivisor':
        return self.divisor((0,) * self.n_rays)

    def canonical_divisor(self) -> 'TDivisor':
        """-K_X, the sum of all toric divisors (all-ones coefficients)."""
        return self.divisor((1,) * self.n_rays)

    def principal_divisor(self, m: Sequence[int]) -> 'TDivisor':
        """div(chi^m), with coefficient <m, v_i> on ray i."""
        return self.divisor(tuple(dot(m, ray) for ray in self.rays))

    @cached_property
    def _pic_bases(self) -> dict:
        return {}

    def pic_basis(self, base_cone: int = 0) -> 'PicBasis':
        if base_cone not in self._pic_bases:
            self._pic_bases[base_cone] = _pic_basis(self, base_cone)
        return self._pic_bases[base_cone]

    def canonical_representation(self, d: 'TDivisor', pic: 'PicBasis | None' = None) -> 'TDivisor':
        """
        The linearly equivalent divisor vanishing on every basis-cone ray.

        Subtracts div(chi^m) with m = sum of d_i m_i over the basis rays, where
        m_i is the dual character of basis ray i.
        """
        self._own(d)
        pic = pic or self.pic_basis()
        m = [0] * self.rank
        for ray, character in zip(pic.basis_rays, pic.dual_characters):
            coeff = d.coeffs[ray]
            if coeff:
                for k in range(self.rank):
                    m[k] += coeff * character[k]
        return d - self.principal_divisor(m)

    def free_coordinates(self, d: 'TDivisor', pic: 'PicBasis | None' = None) -> IntVector:
        """Coordinates of the class of d in the Picard basis of free-ray divisors."""
        pic = pic or self.pic_basis()
        canonical = self.canonical_representation(d, pic)
        return tuple(canonical.coeffs[j] for j in pic.free_rays)

    def from_free_coordinates(self, coords: Sequence[int], pic: 'PicBasis | None' = None) -> 'TDivisor':
        pic = pic or self.pic_basis()
        if len(coords) != len(pic.free_rays):
            raise ValueError(f"expected {len(pic.free_rays)} Picard coordinates, got {len(coords)}")
        coeffs = [0] * self.n_rays
        for ray, value in zip(pic.free_rays, coords):
            coeffs[ray] = value
        return self.divisor(coeffs)

    def same_class(self, a: 'TDivisor', b: 'TDivisor') -> bool:
        return self.canonical_representation(a).coeffs == self.canonical_representation(b).coeffs

    def _own(self, d: 'TDivisor'):
        if d.fan is not self and d.fan != self:
            raise FanMismatchError(f"divisor {d} lives on '{d.fan}', not on '{self}'")

    # Combinatorics
    @cached_property
    def _primitive(self) -> tuple['PrimitiveRelation', ...]:
        return tuple(_primitive_relations(self))

    def primitive_collections(self) -> list['PrimitiveRelation']:
        return list(self._primitive)

    def euler_characteristic(self) -> int:
        """Number of maximal cones, equal to rank K_0(X)."""
        return len(self.max_cones)

    def cone_counts(self) -> tuple[int, ...]:
        """d_j = number of j-dimensional cones, for j = 0..rank."""
        counts = Counter(len(cone) for cone in self.cones)
        return tuple(counts.get(j, 0) for j in range(self.rank + 1))

    def poincare_polynomial(self) -> tuple[int, ...]:
        """Coefficients of P_X(t); odd Betti numbers vanish."""
        n = self.rank
        d = self.cone_counts()
        coefficients = [0] * (2 * n + 1)
        for k in range(n + 1):
            coefficients[2 * k] = sum(
                (-1) ** (i - k) * comb(i, k) * d[n - i] for i in range(k, n + 1)
            )
        return tuple(coefficients)


@dataclass(frozen=True)
class TDivisor:
    fan: Fan = field(repr=False)
    coeffs: IntVector

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != self.fan.n_rays:
            raise ValueError(
                f"divisor has {len(self.coeffs)} coefficients but '{self.fan}' has {self.fan.n_rays} rays"
            )

    def __str__(self):
        return '(' + ', '.join(str(c) for c in self.coeffs) + ')'

    def _check(self, other: 'TDivisor'):
        if other.fan is not self.fan and other.fan != self.fan:
            raise FanMismatchError(f"cannot combine divisors on '{self.fan}' and '{other.fan}'")

    def __add__(self, other: 'TDivisor') -> 'TDivisor':
        self._check(other)
        return TDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: 'TDivisor') -> 'TDivisor':
        self._check(other)
        return TDivisor(self.fan, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> 'TDivisor':
        return TDivisor(self.fan, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> 'TDivisor':
        return TDivisor(self.fan, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def nonnegative_rays(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.coeffs) if c >= 0)


@dataclass(frozen=True)
class PicBasis:
    base_cone: int
    basis_rays: tuple[int, ...]
    free_rays: tuple[int, ...]
    dual_characters: IntMatrix
    # relation_matrix[i][j]: T_{basis_rays[i]} ~ sum_j relation_matrix[i][j] T_{free_rays[j]}
    relation_matrix: IntMatrix

    def substitute(self, d: TDivisor) -> TDivisor:
        """Replace every basis-ray divisor by its relation row."""
        coeffs = list(d.coeffs)
        for i, ray in enumerate(self.basis_rays):
            value = coeffs[ray]
            coeffs[ray] = 0
            for j, free in enumerate(self.free_rays):
                coeffs[free] += value * self.relation_matrix[i][j]
        return TDivisor(d.fan, tuple(coeffs))


@dataclass(frozen=True)
class PrimitiveRelation:
    collection: tuple[int, ...]
    support_cone_rays: tuple[int, ...]
    coefficients: tuple[int, ...]

    def __str__(self):
        left = ' + '.join(f"v{i}" for i in self.collection)
        if not self.support_cone_rays:
            return f"{left} = 0"
        right = ' + '.join(
            f"v{i}" if a == 1 else f"{a}*v{i}"
            for i, a in zip(self.support_cone_rays, self.coefficients)
        )
        return f"{left} = {right}"


def _pic_basis(fan: Fan, base_cone: int) -> PicBasis:
    if not 0 <= base_cone < len(fan.max_cones):
        raise IndexError(f"'{fan}' has no maximal cone {base_cone}")
    basis = fan.max_cones[base_cone]
    chosen = set(basis)
    free = tuple(i for i in range(fan.n_rays) if i not in chosen)
    # rows m_i with <m_i, v_k> = delta_ik on the basis rays
    characters = unimodular_inverse(transpose([fan.rays[i] for i in basis]))
    relations = tuple(
        tuple(-dot(m, fan.rays[j]) for j in free) for m in characters
    )
    return PicBasis(base_cone, basis, free, characters, relations)


def _primitive_relations(fan: Fan) -> list[PrimitiveRelation]:
    found: list[frozenset[int]] = []
    relations = []
    for size in range(2, fan.n_rays + 1):
        for subset in combinations(range(fan.n_rays), size):
            members = frozenset(subset)
            if any(prior <= members for prior in found):
                continue
            if fan.is_cone(members):
                continue
            if not all(fan.is_cone(members - {x}) for x in members):
                continue
            found.append(members)
            relations.append(_primitive_relation(fan, subset))
    return relations


def _primitive_relation(fan: Fan, collection: tuple[int, ...]) -> PrimitiveRelation:
    total = tuple(sum(fan.rays[i][k] for i in collection) for k in range(fan.rank))
    if not any(total):
        return PrimitiveRelation(collection, (), ())
    for cone in fan.max_cones:
        columns = transpose([fan.rays[i] for i in cone])
        coords = solve_integer(columns, total)
        if coords is None or any(c < 0 for c in coords):
            continue
        # shrink to the face whose relative interior holds the sum
        support = tuple((ray, c) for ray, c in zip(cone, coords) if c > 0)
        return PrimitiveRelation(
            collection, tuple(r for r, _ in support), tuple(c for _, c in support)
        )
    raise ValueError(f"sum of primitive collection {collection} lies in no cone of '{fan}'")


def validate(fan: Fan) -> ValidationReport:
    structure = _check_structure(fan)
    checks = [structure]
    if structure.passed:
        primitive = _check_primitive(fan)
        smooth = _check_smooth(fan)
        checks += [primitive, smooth]
        if smooth.passed:
            checks.append(_check_face_intersections(fan))
            checks.append(_check_completeness(fan))
        else:
            checks.append(Check('face-intersection', False, ('skipped: fan is not smooth',)))
            checks.append(Check('complete', False, ('skipped: fan is not smooth',)))
    report = ValidationReport(fan.name, tuple(checks))
    if not report.passed:
        logger.info("Fan '%s' failed validation: %s", fan,
                    ', '.join(check.name for check in report.failures))
    return report


def _check_structure(fan: Fan) -> Check:
    problems = []
    n = fan.rank
    if n < 1:
        problems.append(f"rank must be positive, got {n}")
    for i, ray in enumerate(fan.rays):
        if len(ray) != n:
            problems.append(f"ray {i} has length {len(ray)}, expected {n}")
    if len(set(fan.rays)) != len(fan.rays):
        problems.append("rays are not distinct")
    if not fan.max_cones:
        problems.append("fan has no maximal cones")
    for c, cone in enumerate(fan.max_cones):
        if len(cone) != n or len(set(cone)) != len(cone):
            problems.append(f"maximal cone {c} does not have {n} distinct rays")
        if any(not 0 <= i < fan.n_rays for i in cone):
            problems.append(f"maximal cone {c} references a missing ray")
    if len(set(fan.max_cones)) != len(fan.max_cones):
        problems.append("maximal cones are not distinct")
    used = {i for cone in fan.max_cones for i in cone}
    for i in range(fan.n_rays):
        if i not in used:
            problems.append(f"ray {i} lies in no maximal cone")
    return Check('structure', not problems, tuple(problems))


def _check_primitive(fan: Fan) -> Check:
    problems = tuple(
        f"ray {i} {ray} is not primitive"
        for i, ray in enumerate(fan.rays)
        if gcd(*ray) != 1
    )
    return Check('primitive', not problems, problems)


def _check_smooth(fan: Fan) -> Check:
    problems = []
    for c, cone in enumerate(fan.max_cones):
        det = determinant([fan.rays[i] for i in cone])
        if det not in (1, -1):
            problems.append(f"maximal cone {c} {cone} has determinant {det}")
    return Check('smooth', not problems, tuple(problems))


def _separating_character_exists(fan: Fan, first: Sequence[int], second: Sequence[int]) -> bool:
    shared = set(first) & set(second)
    system = []
    for i in shared:
        system.append(Inequality.at_most(fan.rays[i], 0))
        system.append(Inequality.at_least(fan.rays[i], 0))
    # strict sides scale to +-1 because the system is homogeneous
    for i in set(first) - shared:
        system.append(Inequality.at_least(fan.rays[i], 1))
    for i in set(second) - shared:
        system.append(Inequality.at_most(fan.rays[i], -1))
    return is_feasible(system, fan.rank)


def _check_face_intersections(fan: Fan) -> Check:
    problems = []
    for (a, first), (b, second) in combinations(enumerate(fan.max_cones), 2):
        if not _separating_character_exists(fan, first, second):
            shared = sorted(set(first) & set(second))
            problems.append(
                f"maximal cones {a} and {b} do not meet in their common face {tuple(shared)}"
            )
    return Check('face-intersection', not problems, tuple(problems))


def _check_completeness(fan: Fan) -> Check:
    problems = []
    n = fan.rank
    facets = Counter()
    owners: dict[frozenset, list[int]] = {}
    for c, cone in enumerate(fan.max_cones):
        for facet in combinations(cone, n - 1):
            key = frozenset(facet)
            facets[key] += 1
            owners.setdefault(key, []).append(c)
    for facet, count in facets.items():
        if count != 2:
            problems.append(
                f"facet {tuple(sorted(facet))} lies in {count} maximal cone(s) {owners[facet]}, expected 2"
            )

    # dual graph: maximal cones adjacent across a shared facet
    adjacency = {c: set() for c in range(len(fan.max_cones))}
    for cones in owners.values():
        for a, b in combinations(cones, 2):
            adjacency[a].add(b)
            adjacency[b].add(a)
    reached = {0}
    queue = deque([0])
    while queue:
        for neighbour in adjacency[queue.popleft()]:
            if neighbour not in reached:
                reached.add(neighbour)
                queue.append(neighbour)
    if len(reached) != len(fan.max_cones):
        problems.append(
            f"dual graph is disconnected ({len(reached)} of {len(fan.max_cones)} cones reachable)"
        )

    inverses = [
        unimodular_inverse(transpose([fan.rays[i] for i in cone])) for cone in fan.max_cones
    ]
    rng = random.Random(Config.RANDOM_SEED)
    bound = Config.SAMPLE_COORDINATE_BOUND
    for _ in range(Config.COMPLETENESS_SAMPLES):
        point = (0,) * n
        while not any(point):
            point = tuple(rng.randint(-bound, bound) for _ in range(n))
        if not any(all(x >= 0 for x in mat_vec(inverse, point)) for inverse in inverses):
            problems.append(f"point {point} lies in no maximal cone")
    return Check('complete', not problems, tuple(problems))
