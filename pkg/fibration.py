"""
Toric fiber bundles X -> Z with fiber F.

The total fan is assembled from a fiber fan, a base fan and an integer twist
matrix gamma: fiber rays lift as (v, 0), base basis rays as (0, u) and the base
free ray j as (sum_k gamma[k][j] v_k, u_j), where v_k runs over the rays of the
fiber basis cone. Maximal cones are the unions of a fiber maximal cone with a
lifted base maximal cone.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from errors import FanValidationError, FibrationError
from fan import Fan, PicBasis, PrimitiveRelation, TDivisor
from lattice import IntMatrix, convolve, mat_vec, rank, transpose, unimodular_inverse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FibrationBundle:
    fiber: Fan
    base: Fan
    # one row per fiber basis ray, one column per base free ray
    twist: IntMatrix
    total: Fan
    fiber_cone: int
    base_cone: int
    fiber_rays: tuple[int, ...]
    base_rays: tuple[int, ...]
    total_cone: int

    @property
    def name(self) -> str:
        return self.total.name

    @cached_property
    def fiber_pic(self) -> PicBasis:
        return self.fiber.pic_basis(self.fiber_cone)

    @cached_property
    def base_pic(self) -> PicBasis:
        return self.base.pic_basis(self.base_cone)

    @cached_property
    def total_pic(self) -> PicBasis:
        return self.total.pic_basis(self.total_cone)

    @property
    def is_twisted(self) -> bool:
        return any(any(row) for row in self.twist)


def _bundle_name(fiber: Fan, base: Fan, twist: IntMatrix) -> str:
    if not any(any(row) for row in twist):
        return f"{fiber} x {base}"
    return f"{fiber}-bundle over {base} twisted by {[list(row) for row in twist]}"


def build_fibration(fiber: Fan, base: Fan, twist: Sequence[Sequence[int]],
                    fiber_cone: int = 0, base_cone: int = 0, name: str = '') -> FibrationBundle:
    fiber.require_valid()
    base.require_valid()
    twist = tuple(tuple(int(x) for x in row) for row in twist)
    fiber_pic = fiber.pic_basis(fiber_cone)
    base_pic = base.pic_basis(base_cone)
    d, m = fiber.rank, base.rank
    n_free = len(base_pic.free_rays)
    if len(twist) != d or any(len(row) != n_free for row in twist):
        raise FibrationError(
            f"twist must be a {d} x {n_free} matrix (fiber rank x base free rays), "
            f"got {len(twist)} rows"
        )

    basis_vectors = [fiber.rays[i] for i in fiber_pic.basis_rays]
    rays = [tuple(ray) + (0,) * m for ray in fiber.rays]
    column = {ray: col for col, ray in enumerate(base_pic.free_rays)}
    for j, ray in enumerate(base.rays):
        shift = [0] * d
        if j in column:
            for k, vector in enumerate(basis_vectors):
                for coord in range(d):
                    shift[coord] += twist[k][column[j]] * vector[coord]
        rays.append(tuple(shift) + tuple(ray))

    offset = fiber.n_rays
    cones = [
        tuple(nu) + tuple(offset + j for j in tau)
        for nu in fiber.max_cones
        for tau in base.max_cones
    ]
    total = Fan(d + m, tuple(rays), tuple(cones), name or _bundle_name(fiber, base, twist))
    report = total.validate()
    if not report.passed:
        problems = '; '.join(p for check in report.failures for p in check.problems)
        raise FibrationError(f"assembled fan '{total}' is not smooth and complete: {problems}")

    bundle = FibrationBundle(
        fiber=fiber,
        base=base,
        twist=twist,
        total=total,
        fiber_cone=fiber_cone,
        base_cone=base_cone,
        fiber_rays=tuple(range(offset)),
        base_rays=tuple(offset + j for j in range(base.n_rays)),
        total_cone=fiber_cone * len(base.max_cones) + base_cone,
    )
    logger.debug("Built fibration '%s' with %d rays", total, total.n_rays)
    return bundle


def verify_fibration(total: Fan, fiber_rays: Sequence[int], total_cone: int = 0) -> FibrationBundle:
    """
    Recover the fiber bundle structure of `total` with the given fiber rays.

    The maximal cone `total_cone` fixes coordinates: its rays form a lattice
    basis, its fiber rays become the fiber basis cone and its other rays the
    base basis cone. Raises FibrationError naming the first condition that fails.
    """
    total.require_valid()
    n = total.rank
    fiber_set = set(fiber_rays)
    if not fiber_set or any(not 0 <= i < total.n_rays for i in fiber_set):
        raise FibrationError(f"fiber rays {sorted(fiber_set)} are not rays of '{total}'")
    d = rank([total.rays[i] for i in fiber_set])
    if not 0 < d < n:
        raise FibrationError(f"fiber rays span a subspace of dimension {d}, not a proper one")
    if not 0 <= total_cone < len(total.max_cones):
        raise FibrationError(f"'{total}' has no maximal cone {total_cone}")

    fiber_idx = tuple(sorted(fiber_set))
    base_idx = tuple(i for i in range(total.n_rays) if i not in fiber_set)
    sigma = total.max_cones[total_cone]
    nu0 = [i for i in sigma if i in fiber_set]
    tau0 = [i for i in sigma if i not in fiber_set]
    if len(nu0) != d:
        raise FibrationError(
            f"maximal cone {total_cone} has {len(nu0)} fiber rays, expected {d}"
        )

    # coordinates in the basis given by sigma: fiber part first
    ordered = nu0 + tau0
    inverse = unimodular_inverse(transpose([total.rays[i] for i in ordered]))
    coords = {i: mat_vec(inverse, total.rays[i]) for i in range(total.n_rays)}

    for i in fiber_idx:
        if any(coords[i][d:]):
            raise FibrationError(f"fiber ray {i} does not lie in the span of the fiber cone {tuple(nu0)}")
    for i in base_idx:
        if not any(coords[i][d:]):
            raise FibrationError(f"ray {i} lies in the fiber subspace but is not a fiber ray")

    fiber_local = {i: k for k, i in enumerate(fiber_idx)}
    base_local = {j: k for k, j in enumerate(base_idx)}
    fiber_vectors = tuple(coords[i][:d] for i in fiber_idx)
    base_vectors = tuple(coords[j][d:] for j in base_idx)
    if len(set(base_vectors)) != len(base_vectors):
        raise FibrationError("two rays project to the same base ray")

    fiber_cones, base_cones = [], []
    for c, cone in enumerate(total.max_cones):
        nu = tuple(fiber_local[i] for i in cone if i in fiber_set)
        tau = tuple(base_local[j] for j in cone if j not in fiber_set)
        if len(nu) != d:
            raise FibrationError(
                f"maximal cone {c} {cone} does not decompose as a fiber cone plus a base cone"
            )
        if nu not in fiber_cones:
            fiber_cones.append(nu)
        if tau not in base_cones:
            base_cones.append(tau)
    expected = {
        tuple(sorted(tuple(fiber_idx[i] for i in nu) + tuple(base_idx[j] for j in tau)))
        for nu in fiber_cones
        for tau in base_cones
    }
    if expected != {tuple(cone) for cone in total.max_cones}:
        raise FibrationError(
            f"maximal cones of '{total}' are not all unions of a fiber cone and a base cone"
        )

    fiber = Fan(d, fiber_vectors, tuple(fiber_cones), f"fiber of {total}")
    base = Fan(n - d, base_vectors, tuple(base_cones), f"base of {total}")
    for part, label in ((fiber, 'fiber'), (base, 'base')):
        try:
            part.require_valid()
        except FanValidationError as e:
            raise FibrationError(f"{label} fan is not smooth and complete: {e}") from e

    fiber_cone = fiber.max_cones.index(tuple(sorted(fiber_local[i] for i in nu0)))
    base_cone = base.max_cones.index(tuple(sorted(base_local[j] for j in tau0)))
    base_pic = base.pic_basis(base_cone)
    twist = tuple(
        tuple(coords[base_idx[j]][k] for j in base_pic.free_rays)
        for k in range(d)
    )
    logger.info("'%s' is a fibration with twist %s", total, twist)
    return FibrationBundle(
        fiber=fiber,
        base=base,
        twist=twist,
        total=total,
        fiber_cone=fiber_cone,
        base_cone=base_cone,
        fiber_rays=fiber_idx,
        base_rays=base_idx,
        total_cone=total_cone,
    )


def pullback_from_base(bundle: FibrationBundle, H: TDivisor) -> TDivisor:
    if H.fan != bundle.base:
        raise FibrationError(f"{H} is not a divisor on the base '{bundle.base}'")
    coeffs = [0] * bundle.total.n_rays
    for j, total_index in enumerate(bundle.base_rays):
        coeffs[total_index] = H.coeffs[j]
    return bundle.total.divisor(coeffs)


def lift_from_fiber(bundle: FibrationBundle, L: TDivisor) -> TDivisor:
    """O_X(sum a_i F_i) over the fiber free rays, a_i the Picard coordinates of L."""
    if L.fan != bundle.fiber:
        raise FibrationError(f"{L} is not a divisor on the fiber '{bundle.fiber}'")
    canonical = bundle.fiber.canonical_representation(L, bundle.fiber_pic)
    coeffs = [0] * bundle.total.n_rays
    for i, total_index in enumerate(bundle.fiber_rays):
        coeffs[total_index] = canonical.coeffs[i]
    return bundle.total.divisor(coeffs)


def restrict_to_fiber(bundle: FibrationBundle, L: TDivisor) -> TDivisor:
    canonical = bundle.total.canonical_representation(L, bundle.total_pic)
    return bundle.fiber.divisor(tuple(canonical.coeffs[i] for i in bundle.fiber_rays))


def base_component(bundle: FibrationBundle, L: TDivisor) -> TDivisor:
    """The base class beta with L = lift(L|_F) + pullback(beta)."""
    canonical = bundle.total.canonical_representation(L, bundle.total_pic)
    return bundle.base.divisor(tuple(canonical.coeffs[j] for j in bundle.base_rays))


def rank_k0_check(bundle: FibrationBundle) -> bool:
    total, fiber, base = bundle.total, bundle.fiber, bundle.base
    counts = total.euler_characteristic() == fiber.euler_characteristic() * base.euler_characteristic()
    poincare = total.poincare_polynomial() == convolve(
        fiber.poincare_polynomial(), base.poincare_polynomial()
    )
    return counts and poincare


@dataclass(frozen=True)
class RelationClasses:
    fiber_internal: tuple[PrimitiveRelation, ...]
    lifted_base: tuple[PrimitiveRelation, ...]


def classify_primitive_relations(bundle: FibrationBundle) -> RelationClasses:
    """
    Split the total fan's primitive relations into fiber-internal ones and
    lifted base ones.
    """
    fiber_set = set(bundle.fiber_rays)
    internal, lifted = [], []
    for relation in bundle.total.primitive_collections():
        if set(relation.collection) <= fiber_set:
            internal.append(relation)
        elif not set(relation.collection) & fiber_set:
            lifted.append(relation)
        else:
            raise FibrationError(
                f"primitive collection {relation.collection} mixes fiber and base rays"
            )
    return RelationClasses(tuple(internal), tuple(lifted))


def _fiber_terms(bundle: FibrationBundle, relation: PrimitiveRelation) -> tuple[int, ...]:
    fiber_set = set(bundle.fiber_rays)
    return tuple(
        a for ray, a in zip(relation.support_cone_rays, relation.coefficients) if ray in fiber_set
    )


def is_trivial_fibration(bundle: FibrationBundle) -> bool:
    """Trivial iff no lifted base relation picks up fiber-ray terms."""
    return not any(
        _fiber_terms(bundle, relation)
        for relation in classify_primitive_relations(bundle).lifted_base
    )


def _twist_entries(bundle: FibrationBundle) -> dict[tuple[int, int], int]:
    # keyed by (total index of a fiber basis ray, total index of a base free ray)
    fiber_basis = [bundle.fiber_rays[i] for i in bundle.fiber_pic.basis_rays]
    base_free = [bundle.base_rays[j] for j in bundle.base_pic.free_rays]
    return {
        (f, b): bundle.twist[k][c]
        for k, f in enumerate(fiber_basis)
        for c, b in enumerate(base_free)
    }


def _check_part(label: str, part: Fan, rays: Sequence[int], cone: int,
                found: Fan, found_rays: Sequence[int], sigma: set[int]):
    if {rays[i] for i in part.max_cones[cone]} != sigma & set(rays):
        raise FibrationError(f"{label} cone {cone} is not the {label} part of the total cone")
    cones = {frozenset(rays[i] for i in c) for c in part.max_cones}
    if cones != {frozenset(found_rays[k] for k in c) for c in found.max_cones}:
        raise FibrationError(f"{label} cones do not match the cones of the total fan")
    local = {t: k for k, t in enumerate(found_rays)}
    basis = sorted(part.max_cones[cone], key=lambda i: rays[i])
    inverse = unimodular_inverse(transpose([part.rays[i] for i in basis]))
    for i, ray in enumerate(part.rays):
        if mat_vec(inverse, ray) != found.rays[local[rays[i]]]:
            raise FibrationError(f"{label} ray {i} does not match total ray {rays[i]}")


def check_bundle(bundle: FibrationBundle) -> FibrationBundle:
    """
    Confirm that the fiber, base, twist and ray maps of a bundle describe its
    total fan. Fans are compared in the coordinates of the chosen cones, so a
    bundle given in other lattice coordinates is accepted.
    """
    recovered = verify_fibration(bundle.total, bundle.fiber_rays, bundle.total_cone)
    sigma = set(bundle.total.max_cones[bundle.total_cone])
    _check_part('fiber', bundle.fiber, bundle.fiber_rays, bundle.fiber_cone,
                recovered.fiber, recovered.fiber_rays, sigma)
    _check_part('base', bundle.base, bundle.base_rays, bundle.base_cone,
                recovered.base, recovered.base_rays, sigma)
    if _twist_entries(bundle) != _twist_entries(recovered):
        raise FibrationError(
            f"twist {[list(row) for row in bundle.twist]} does not match the twist "
            f"{[list(row) for row in recovered.twist]} read off the total fan"
        )
    return bundle
