from dataclasses import replace

import pytest

import catalog
from cohomology import decompose_representation
from conftest import catalog_bundles, random_divisor
from errors import FibrationError
from fibration import (
    base_component,
    build_fibration,
    check_bundle,
    classify_primitive_relations,
    is_trivial_fibration,
    lift_from_fiber,
    pullback_from_base,
    rank_k0_check,
    restrict_to_fiber,
    verify_fibration,
)


class TestBuild:
    def test_hirzebruch_rays(self):
        for a in range(6):
            total = catalog.hirzebruch(a).total
            assert total.rays == ((1, 0), (-1, 0), (0, 1), (a, -1))
            assert len(total.max_cones) == 4

    def test_zero_twist_is_the_product(self, p1xp1):
        F0 = catalog.hirzebruch(0)
        assert F0.total == p1xp1.total
        assert F0.total.rays == p1xp1.total.rays
        assert F0.total.max_cones == p1xp1.total.max_cones

    def test_p1_bundle_over_p2(self):
        bundle = catalog.p1_bundle_over_p2(1)
        assert bundle.total.n_rays == 5
        assert len(bundle.total.max_cones) == 6
        assert bundle.total.validate().passed
        assert bundle.total.rays[-1] == (1, -1, -1)

    def test_twist_shape_checked(self, p1):
        with pytest.raises(FibrationError, match='1 x 1'):
            build_fibration(p1, p1, ((1, 2),))

    def test_negative_twist_accepted(self, p1):
        bundle = build_fibration(p1, p1, ((-2,),))
        assert bundle.total.rays[-1] == (-2, -1)
        assert bundle.is_twisted

    def test_bases_recorded(self, p1xp2):
        assert p1xp2.total_cone == 0
        assert p1xp2.total_pic.basis_rays == (0, 2, 3)
        assert p1xp2.fiber_pic.basis_rays == (0,)
        assert p1xp2.base_pic.free_rays == (2,)


class TestVerify:
    @pytest.mark.parametrize('a', range(4))
    def test_hirzebruch_round_trip(self, a):
        bundle = verify_fibration(catalog.hirzebruch(a).total, [0, 1])
        assert bundle.twist == ((a,),)
        assert bundle.fiber == catalog.projective_space(1)
        assert bundle.base == catalog.projective_space(1)

    def test_product(self, p1xp1):
        assert verify_fibration(p1xp1.total, [0, 1]).twist == ((0,),)

    def test_incomplete_fiber_fails(self, p2):
        with pytest.raises(FibrationError):
            verify_fibration(p2, [0])

    def test_whole_space_is_not_a_proper_subspace(self, p2):
        with pytest.raises(FibrationError, match='proper'):
            verify_fibration(p2, [0, 1, 2])

    @pytest.mark.parametrize('bundle', catalog_bundles(), ids=lambda b: b.name)
    def test_round_trip(self, bundle):
        recovered = verify_fibration(bundle.total, bundle.fiber_rays, bundle.total_cone)
        assert recovered.twist == bundle.twist
        assert recovered.fiber_rays == bundle.fiber_rays
        assert recovered.base_rays == bundle.base_rays


class TestCheckBundle:
    @pytest.mark.parametrize('bundle', catalog_bundles(), ids=lambda b: b.name)
    def test_built_bundles_agree(self, bundle):
        assert check_bundle(bundle) is bundle

    def test_recovered_bundle_agrees(self, hirzebruch):
        recovered = verify_fibration(hirzebruch.total, [0, 1], 3)
        assert check_bundle(recovered) is recovered

    def test_wrong_twist(self):
        bundle = replace(catalog.hirzebruch(2), twist=((1,),))
        with pytest.raises(FibrationError, match='twist'):
            check_bundle(bundle)

    def test_fiber_cone_outside_total_cone(self):
        bundle = replace(catalog.hirzebruch(2), fiber_cone=1)
        with pytest.raises(FibrationError, match='fiber cone 1'):
            check_bundle(bundle)

    def test_ray_maps_not_a_fibration(self):
        bundle = replace(catalog.hirzebruch(2), fiber_rays=(2, 3), base_rays=(0, 1))
        with pytest.raises(FibrationError, match='proper'):
            check_bundle(bundle)


class TestDivisorTransport:
    def test_pullback(self, hirzebruch):
        assert pullback_from_base(hirzebruch, hirzebruch.base.zero_divisor()).is_zero
        assert pullback_from_base(hirzebruch, hirzebruch.base.divisor((0, 1))).coeffs == (0, 0, 0, 1)

    def test_restrict_fiber_ray(self, hirzebruch):
        for c in range(-3, 4):
            restricted = restrict_to_fiber(hirzebruch, hirzebruch.total.divisor((0, c, 0, 0)))
            assert hirzebruch.fiber.same_class(restricted, hirzebruch.fiber.divisor((0, c)))

    def test_restrict_canonical(self, p1xp1):
        K_X = -p1xp1.total.canonical_divisor()
        K_F = -p1xp1.fiber.canonical_divisor()
        assert p1xp1.fiber.same_class(restrict_to_fiber(p1xp1, K_X), K_F)
        assert p1xp1.fiber.free_coordinates(restrict_to_fiber(p1xp1, K_X)) == (-2,)

    def test_lift_then_split(self, hirzebruch):
        L = hirzebruch.fiber.divisor((2, 1))
        lifted = lift_from_fiber(hirzebruch, L)
        assert hirzebruch.fiber.same_class(restrict_to_fiber(hirzebruch, lifted), L)
        assert base_component(hirzebruch, lifted).is_zero

    @pytest.mark.parametrize('bundle', catalog_bundles(), ids=lambda b: b.name)
    def test_pullbacks_are_trivial_on_fibers(self, bundle, rng):
        for _ in range(10):
            H = random_divisor(bundle.base, rng)
            pulled = pullback_from_base(bundle, H)
            assert restrict_to_fiber(bundle, pulled).fan == bundle.fiber
            assert bundle.fiber.same_class(restrict_to_fiber(bundle, pulled), bundle.fiber.zero_divisor())
            split = decompose_representation(bundle, pulled)
            assert split.r1.is_zero
            assert split.correction.is_zero


@pytest.mark.parametrize('bundle', catalog_bundles(), ids=lambda b: b.name)
def test_rank_k0(bundle):
    assert rank_k0_check(bundle)
    assert len(bundle.total.max_cones) == len(bundle.fiber.max_cones) * len(bundle.base.max_cones)


def test_rank_k0_examples():
    assert catalog.hirzebruch(2).total.poincare_polynomial() == (1, 0, 2, 0, 1)
    bundle = catalog.p1_bundle_over_p2(1)
    assert bundle.total.euler_characteristic() == 6 == 2 * 3


class TestPrimitiveRelations:
    def test_hirzebruch_classes(self):
        for a in range(4):
            bundle = catalog.hirzebruch(a)
            classes = classify_primitive_relations(bundle)
            assert [r.collection for r in classes.fiber_internal] == [(0, 1)]
            assert [r.collection for r in classes.lifted_base] == [(2, 3)]
            assert is_trivial_fibration(bundle) == (a == 0)

    def test_fiber_relations_unchanged(self, p1xp2):
        classes = classify_primitive_relations(catalog.p1_bundle_over_p2(2))
        fiber_relations = p1xp2.fiber.primitive_collections()
        assert [r.coefficients for r in classes.fiber_internal] == [r.coefficients for r in fiber_relations]
        lifted = classes.lifted_base[0]
        assert lifted.collection == (2, 3, 4)
        assert lifted.support_cone_rays == (0,)
        assert lifted.coefficients == (2,)

    def test_products_are_trivial(self, p1xp1, p1xp2):
        assert is_trivial_fibration(p1xp1)
        assert is_trivial_fibration(p1xp2)
        assert not is_trivial_fibration(catalog.p1_bundle_over_p2(1))
